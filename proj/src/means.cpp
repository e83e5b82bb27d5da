#include "meanfield/means.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/special_functions/legendre.hpp>

#include "meanfield/parallel.hpp"

namespace meanfield {

namespace {

GaussRule compute_gauss_legendre(int m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  // Non-negative zeros in ascending order; the rule is symmetric about 0.
  const std::vector<long double> zeros = boost::math::legendre_p_zeros<long double>(m);
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    const long double z = zeros[k];
    const long double dp = boost::math::legendre_p_prime<long double>(m, z);
    const double w = static_cast<double>(2.0L / ((1.0L - z * z) * dp * dp));
    const int hi = m / 2 + static_cast<int>(k);
    const int lo = (m - 1) / 2 - static_cast<int>(k);
    rule.nodes[hi] = static_cast<double>(z);
    rule.weights[hi] = w;
    if (lo != hi) {
      rule.nodes[lo] = -static_cast<double>(z);
      rule.weights[lo] = w;
    }
  }
  return rule;
}

/// Unit-sphere nodes with weights summing to one.
struct SphereRule {
  std::vector<Point> directions;
  std::vector<double> weights;
};

SphereRule compute_sphere_rule(int n, int order) {
  SphereRule rule;
  if (n == 1) {
    rule.directions = {Point{-1.0}, Point{1.0}};
    rule.weights = {0.5, 0.5};
  } else if (n == 2) {
    for (int j = 0; j < order; ++j) {
      const double t = 2.0 * M_PI * j / order;
      rule.directions.push_back(Point{std::cos(t), std::sin(t)});
      rule.weights.push_back(1.0 / order);
    }
  } else {
    const GaussRule& polar = gauss_legendre(order);
    const int azimuths = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double c = polar.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < azimuths; ++j) {
        const double phi = 2.0 * M_PI * j / azimuths;
        rule.directions.push_back(Point{s * std::cos(phi), s * std::sin(phi), c});
        rule.weights.push_back(0.5 * polar.weights[i] / azimuths);
      }
    }
  }
  return rule;
}

const SphereRule& sphere_rule(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SphereRule> cache;
  std::lock_guard lock(mutex);
  auto key = std::pair{n, n == 1 ? 0 : order};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_sphere_rule(n, order)).first;
  return it->second;
}

void check_inputs(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad) {
  quad.validate();
  if (ball.dim() != f.dim()) throw std::invalid_argument("dimension mismatch between field and ball");
  if (!f.defined_on(ball)) {
    throw std::domain_error("sphere " + ball.center.str() + " r=" + std::to_string(ball.radius) +
                            " exits the field's domain");
  }
}

double sphere_sum(const ScalarField& f, const Point& center, double radius, const SphereRule& rule) {
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.directions.size(); ++j) {
    sum += rule.weights[j] * f(center + radius * rule.directions[j]);
  }
  return sum;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (angular < 8) throw std::invalid_argument("angular order must be >= 8");
  if (radial < 4) throw std::invalid_argument("radial order must be >= 4");
}

const GaussRule& gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss_legendre(m)).first;
  return it->second;
}

double sphere_average(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad) {
  check_inputs(f, ball, quad);
  return sphere_sum(f, ball.center, ball.radius, sphere_rule(f.dim(), quad.angular));
}

double ball_average(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad) {
  check_inputs(f, ball, quad);
  const int n = f.dim();
  const SphereRule& rule = sphere_rule(n, quad.angular);
  const GaussRule& radial = gauss_legendre(quad.radial);
  double sum = 0.0;
  for (int i = 0; i < quad.radial; ++i) {
    const double s = 0.5 * (1.0 + radial.nodes[i]);
    sum += 0.5 * radial.weights[i] * std::pow(s, n - 1) * sphere_sum(f, ball.center, s * ball.radius, rule);
  }
  return n * sum;
}

MeanPair mean_pair(const ScalarField& f, const BallSpec& ball, const QuadratureSpec& quad,
                   std::optional<double> kappa) {
  MeanPair m;
  m.ball = ball;
  m.ball_mean = ball_average(f, ball, quad);
  m.sphere_mean = sphere_average(f, ball, quad);
  if (kappa) {
    if (!(*kappa > 0.0) || !(*kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
    m.sphere_mean_at_kappa = sphere_average(f, BallSpec(ball.center, *kappa * ball.radius), quad);
  }
  return m;
}

std::vector<MeanPair> mean_pairs(const ScalarField& f, const std::vector<BallSpec>& balls,
                                 const QuadratureSpec& quad, std::optional<double> kappa) {
  std::vector<MeanPair> out(balls.size());
  parallel_for(balls.size(), [&](std::size_t i) { out[i] = mean_pair(f, balls[i], quad, kappa); });
  return out;
}

std::vector<ProfileRow> radial_profile(const ScalarField& f, const Point& center, const std::vector<double>& radii,
                                       const QuadratureSpec& quad) {
  const int n = f.dim();
  std::vector<ProfileRow> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    const double s = sphere_average(f, BallSpec(center, r), quad);
    rows.push_back({r, s, unit_sphere_area(n) * std::pow(r, n - 1) * s});
  }
  return rows;
}

}  // namespace meanfield
