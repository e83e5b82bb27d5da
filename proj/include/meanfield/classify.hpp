#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "meanfield/fields.hpp"
#include "meanfield/geometry.hpp"
#include "meanfield/means.hpp"

namespace meanfield {

/// Finite family of test balls: centers on a lattice (offset by half a
/// spacing from the bounding box corner), and per center the radius ladder
/// base * ratio^j, j = 0..levels, with base = min(r_max, 0.999 dist(center, dOmega)).
/// Radii below r_min are dropped, as are centers left with fewer than 4 radii.
struct BallSampler {
  double spacing = 0.1;
  double r_max = 0.25;
  double ratio = 0.70710678118654752;  // 2^{-1/2}
  int levels = 4;
  double r_min = 1e-3;

  void validate() const;
  std::vector<BallSpec> balls(const DomainSpec& domain) const;
};

enum class Verdict { kPass, kFail };

inline const char* to_string(Verdict v) { return v == Verdict::kPass ? "pass" : "fail"; }

struct ClassificationReport {
  std::string test;
  Verdict verdict = Verdict::kPass;
  double worst_margin = 0.0;
  BallSpec witness;
  std::size_t balls_tested = 0;
  double tolerance = 0.0;
  std::optional<double> kappa;

  bool passed() const { return verdict == Verdict::kPass; }
};

/// Radius ratio kappa_B: 1/2 (n = 1), e^{-1/2} (n = 2), (2/n)^{1/(n-2)} (n >= 3).
double kappa_beardon(int n);

/// Largest ratio for which the converse holds: the positive root of
/// k^2 + (n/2) k - n/2.
double kappa_one(int n);

/// n (1 - kappa) / 2 - kappa^2; the sign of Laplacian u is forced by this
/// factor times Laplacian u >= 0 in the small-radius limit of the inequality.
double factor_kappa(int n, double kappa);

/// 1e-8 for smooth analytic fields, 1e-4 * range otherwise.
double default_tolerance(const ScalarField& f, double field_range);

/// max |B - S| <= tol over the sampled balls.
ClassificationReport test_harmonic(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                   const QuadratureSpec& quad, double tol);

/// max (B - S) <= tol over the sampled balls.
ClassificationReport test_subharmonic(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                      const QuadratureSpec& quad, double tol);

/// max (S(kappa r) - B(r)) <= tol over the sampled balls.
ClassificationReport test_beardon(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                  const QuadratureSpec& quad, double kappa, double tol);

struct BeardonThreshold {
  double kappa = 1.0;
  bool degenerate = false;  // no sign change of S(kappa r) - B(r) on (0, 1)
};

/// Bisection for the ratio kappa* at which S_a(kappa r) = B_a(r), to a
/// bracket width of tol_kappa.
BeardonThreshold beardon_threshold(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad,
                                   double tol_kappa);

struct LaplacianEstimate {
  double value = 0.0;               // extrapolated to r -> 0
  std::vector<double> per_radius;   // 2n (S_p(r) - u(p)) / r^2
};

/// Richardson extrapolation in r^2 of the sphere-mean Laplacian estimates.
/// Needs at least three strictly decreasing radii.
LaplacianEstimate laplacian_sign_estimate(const ScalarField& f, const Point& p, const std::vector<double>& radii,
                                          const QuadratureSpec& quad = {});

/// max over interior nodes <= max over boundary nodes + 1e-9 * range.
bool max_principle_check(const ScalarField& f, const DiscretizedDomain& domain);

}  // namespace meanfield
