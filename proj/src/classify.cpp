#include "meanfield/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "meanfield/parallel.hpp"

namespace meanfield {

namespace {

void check_dimension(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be a positive integer");
}

using MarginFn = std::function<double(const BallSpec&)>;

ClassificationReport sweep(std::string name, const ScalarField& f, const DomainSpec& domain,
                           const BallSampler& sampler, double tol, const MarginFn& margin) {
  if (f.dim() != domain.dim()) throw std::invalid_argument("dimension mismatch between field and domain");
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  const std::vector<BallSpec> balls = sampler.balls(domain);
  if (balls.empty()) throw std::invalid_argument("sampler produced no admissible balls (domain too small for ladder)");

  std::vector<double> margins(balls.size());
  parallel_for(balls.size(), [&](std::size_t i) { margins[i] = margin(balls[i]); });

  const auto worst = std::max_element(margins.begin(), margins.end());
  ClassificationReport report;
  report.test = std::move(name);
  report.worst_margin = *worst;
  report.witness = balls[static_cast<std::size_t>(worst - margins.begin())];
  report.balls_tested = balls.size();
  report.tolerance = tol;
  report.verdict = *worst <= tol ? Verdict::kPass : Verdict::kFail;
  return report;
}

}  // namespace

void BallSampler::validate() const {
  if (!(spacing > 0.0)) throw std::invalid_argument("sampler spacing must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("sampler r_max must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("sampler ratio must lie in (0, 1)");
  if (levels < 3) throw std::invalid_argument("sampler needs levels >= 3 (at least 4 radii)");
  if (!(r_min >= 0.0)) throw std::invalid_argument("sampler r_min must be non-negative");
}

std::vector<BallSpec> BallSampler::balls(const DomainSpec& domain) const {
  validate();
  const int n = domain.dim();
  const auto [lo, hi] = domain.bounding_box();
  std::array<int, kMaxDim> steps{1, 1, 1};
  for (int a = 0; a < n; ++a) {
    steps[a] = std::max(1, static_cast<int>(std::floor((hi[a] - lo[a]) / spacing)));
  }
  std::vector<BallSpec> out;
  std::vector<BallSpec> ladder;
  for (int k = 0; k < steps[2]; ++k) {
    for (int j = 0; j < steps[1]; ++j) {
      for (int i = 0; i < steps[0]; ++i) {
        const std::array<int, kMaxDim> idx{i, j, k};
        Point c = Point::zeros(n);
        for (int a = 0; a < n; ++a) c[a] = lo[a] + (idx[a] + 0.5) * spacing;
        const double sd = signed_distance(domain, c);
        if (!(sd < 0.0)) continue;
        const double base = std::min(r_max, 0.999 * -sd);
        ladder.clear();
        double r = base;
        for (int level = 0; level <= levels; ++level, r *= ratio) {
          if (r < r_min) break;
          BallSpec ball(c, r);
          if (contains_closed_ball(domain, ball)) ladder.push_back(ball);
        }
        if (ladder.size() >= 4) out.insert(out.end(), ladder.begin(), ladder.end());
      }
    }
  }
  return out;
}

double kappa_beardon(int n) {
  check_dimension(n);
  if (n == 1) return 0.5;
  if (n == 2) return std::exp(-0.5);
  return std::pow(2.0 / n, 1.0 / (n - 2.0));
}

double kappa_one(int n) {
  check_dimension(n);
  return -n / 4.0 + 0.5 * std::sqrt(n * n / 4.0 + 2.0 * n);
}

double factor_kappa(int n, double kappa) {
  check_dimension(n);
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  return 0.5 * n * (1.0 - kappa) - kappa * kappa;
}

double default_tolerance(const ScalarField& f, double field_range) {
  return f.smooth() ? 1e-8 : 1e-4 * field_range;
}

ClassificationReport test_harmonic(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                   const QuadratureSpec& quad, double tol) {
  quad.validate();
  return sweep("harmonic", f, domain, sampler, tol, [&](const BallSpec& b) {
    return std::abs(ball_average(f, b, quad) - sphere_average(f, b, quad));
  });
}

ClassificationReport test_subharmonic(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                      const QuadratureSpec& quad, double tol) {
  quad.validate();
  return sweep("subharmonic", f, domain, sampler, tol,
               [&](const BallSpec& b) { return ball_average(f, b, quad) - sphere_average(f, b, quad); });
}

ClassificationReport test_beardon(const ScalarField& f, const DomainSpec& domain, const BallSampler& sampler,
                                  const QuadratureSpec& quad, double kappa, double tol) {
  quad.validate();
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  auto report = sweep("beardon", f, domain, sampler, tol, [&](const BallSpec& b) {
    return sphere_average(f, BallSpec(b.center, kappa * b.radius), quad) - ball_average(f, b, quad);
  });
  report.kappa = kappa;
  return report;
}

BeardonThreshold beardon_threshold(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad,
                                   double tol_kappa) {
  if (!(tol_kappa > 0.0)) throw std::invalid_argument("tol_kappa must be positive");
  const double b = ball_average(f, ball, quad);
  const double noise = 1e-12 * std::max(1.0, std::abs(b));
  auto gap = [&](double kappa) {
    if (kappa <= 0.0) return f(ball.center) - b;
    return sphere_average(f, BallSpec(ball.center, kappa * ball.radius), quad) - b;
  };
  const double g_lo = gap(0.0);
  const double g_hi = gap(1.0);
  const bool rising = g_lo < -noise && g_hi > noise;
  const bool falling = g_lo > noise && g_hi < -noise;
  if (!rising && !falling) return {1.0, true};
  const auto bracket = boost::math::tools::bisect(
      gap, 0.0, 1.0, [tol_kappa](double a, double b) { return std::abs(b - a) <= tol_kappa; });
  return {0.5 * (bracket.first + bracket.second), false};
}

LaplacianEstimate laplacian_sign_estimate(const ScalarField& f, const Point& p, const std::vector<double>& radii,
                                          const QuadratureSpec& quad) {
  if (radii.size() < 3) throw std::invalid_argument("laplacian_sign_estimate needs at least 3 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument("radii not strictly decreasing");
  }
  const int n = f.dim();
  const double center = f(p);
  LaplacianEstimate est;
  std::vector<double> x;
  for (double r : radii) {
    const double s = sphere_average(f, BallSpec(p, r), quad);
    est.per_radius.push_back(2.0 * n * (s - center) / (r * r));
    x.push_back(r * r);
  }
  // Neville's scheme for the interpolating polynomial in r^2, evaluated at 0.
  std::vector<double> t = est.per_radius;
  const std::size_t m = t.size();
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t i = 0; i + level < m; ++i) {
      t[i] = (x[i] * t[i + 1] - x[i + level] * t[i]) / (x[i] - x[i + level]);
    }
  }
  est.value = t[0];
  return est;
}

bool max_principle_check(const ScalarField& f, const DiscretizedDomain& domain) {
  double interior_max = -std::numeric_limits<double>::infinity();
  double boundary_max = interior_max;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.interior_count(); ++i) {
    const double v = f(domain.interior_point(i));
    interior_max = std::max(interior_max, v);
    lowest = std::min(lowest, v);
  }
  for (const BoundaryNode& b : domain.boundary()) {
    const double v = f(b.point);
    boundary_max = std::max(boundary_max, v);
    lowest = std::min(lowest, v);
  }
  const double range = std::max(interior_max, boundary_max) - lowest;
  return interior_max <= boundary_max + 1e-9 * range;
}

}  // namespace meanfield
