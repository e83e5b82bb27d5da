#pragma once

#include <optional>
#include <vector>

#include "meanfield/fields.hpp"
#include "meanfield/point.hpp"

namespace meanfield {

/// Angular order: equispaced circle nodes (n = 2), or Gauss-Legendre nodes in
/// cos(theta) with twice as many equispaced azimuths (n = 3). Radial order:
/// Gauss-Legendre nodes on [0, r].
struct QuadratureSpec {
  int angular = 32;
  int radial = 16;

  void validate() const;
};

/// Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached; safe to call concurrently.
const GaussRule& gauss_legendre(int m);

struct MeanPair {
  BallSpec ball;
  double ball_mean = 0.0;
  double sphere_mean = 0.0;
  std::optional<double> sphere_mean_at_kappa;
};

struct ProfileRow {
  double radius = 0.0;
  double sphere_mean = 0.0;
  double surface_integral = 0.0;  // |dB(a, r)| * sphere_mean
};

/// (1 / |dB|) * integral of f over the sphere dB(a, r).
double sphere_average(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad = {});

/// (1 / |B|) * integral of f over B(a, r), computed as
/// (n / r^n) * integral_0^r t^{n-1} S_a(t) dt.
double ball_average(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad = {});

MeanPair mean_pair(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad = {},
                   std::optional<double> kappa = std::nullopt);

/// Results ordered as the input balls; evaluated across worker threads.
std::vector<MeanPair> mean_pairs(const ScalarField& f, const std::vector<BallSpec>& balls,
                                 const QuadratureSpec& quad = {}, std::optional<double> kappa = std::nullopt);

std::vector<ProfileRow> radial_profile(const ScalarField& f, const Point& center, const std::vector<double>& radii,
                                       const QuadratureSpec& quad = {});

}  // namespace meanfield
