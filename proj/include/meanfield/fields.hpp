#pragma once

#include <memory>
#include <string>
#include <vector>

#include "meanfield/grid.hpp"
#include "meanfield/point.hpp"

namespace meanfield {

/// Raised by laplacian_exact when no exact Laplacian exists at the point.
class NoExactLaplacian : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fundamental solution of the Laplacian, normalised increasing in rho:
/// rho (n = 1), ln(rho) / 2pi (n = 2), -rho^{2-n} / ((n-2) |S^{n-1}|) (n >= 3).
double fundamental_solution(int n, double rho);

namespace detail {

/// Extension point for field representations. Implementations are immutable.
class FieldImpl {
 public:
  virtual ~FieldImpl() = default;
  virtual int dim() const = 0;
  virtual double eval(const Point& p) const = 0;
  /// Throws NoExactLaplacian when unavailable.
  virtual double laplacian(const Point& p) const = 0;
  /// True when the field is defined on the whole closed ball.
  virtual bool defined_on(const BallSpec& ball) const { return ball.dim() == dim(); }
  virtual bool smooth() const { return true; }
  virtual std::string describe() const = 0;
};

}  // namespace detail

/// Continuous real-valued field on a region of R^n. Cheap to copy; shares an
/// immutable representation.
class ScalarField {
 public:
  explicit ScalarField(std::shared_ptr<const detail::FieldImpl> impl);

  int dim() const { return impl_->dim(); }
  double operator()(const Point& p) const;
  double laplacian(const Point& p) const;
  bool defined_on(const BallSpec& ball) const { return impl_->defined_on(ball); }
  /// False for max-combinations, tents and grid samples (kinks).
  bool smooth() const { return impl_->smooth(); }
  std::string describe() const { return impl_->describe(); }
  const detail::FieldImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const detail::FieldImpl> impl_;
};

inline double eval(const ScalarField& f, const Point& p) { return f(p); }
inline double laplacian_exact(const ScalarField& f, const Point& p) { return f.laplacian(p); }

// Catalog.

ScalarField constant(int dim, double c);

/// prod_i x_i^{exponent_i}; the number of exponents sets the dimension.
ScalarField monomial(std::vector<int> exponents);

enum class HarmonicPart { kReal, kImag };

/// Re or Im of (x + i y)^degree for degree 0..4, embedded in R^dim (dim >= 2).
ScalarField harmonic_poly(int dim, HarmonicPart part, int degree);

/// Named harmonic polynomials: "x2-y2", "x3-3xy2", "xy", "re<m>", "im<m>".
ScalarField harmonic_poly(int dim, const std::string& id);

/// e^x cos y, harmonic in R^dim (dim >= 2).
ScalarField exp_cos(int dim);

/// |x - center|^{2p}.
ScalarField radial_power(const Point& center, int p);

/// amplitude * Psi(|x - pole| / scale) + offset, harmonic away from the pole.
ScalarField fundamental_shift(const Point& pole, double scale, double amplitude, double offset);

/// max{1, k - k^2 x, k + k^2 (x - 1)} on [0, 1].
ScalarField one_d_tent(int k);

/// scale * f + shift.
ScalarField affine_transform(const ScalarField& f, double shift, double scale);

/// Pointwise maximum of a nonempty list of fields of common dimension.
ScalarField max_combine(const std::vector<ScalarField>& fields);

/// Multilinear interpolation of grid samples, defined on the sample box.
ScalarField grid_field(GridSamples samples);
ScalarField load_grid_field(const std::string& path);

}  // namespace meanfield
