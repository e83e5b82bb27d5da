#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// quadrature or solver code under test.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "meanfield/point.hpp"

namespace oracle {

using meanfield::Point;

/// Multivariate polynomial in up to three variables, exact arithmetic on
/// coefficients keyed by exponent triples.
class Poly {
 public:
  using Exps = std::array<int, 3>;

  Poly() = default;
  static Poly constant(double c) {
    Poly p;
    if (c != 0.0) p.terms_[{0, 0, 0}] = c;
    return p;
  }
  static Poly monomial(Exps e, double c = 1.0) {
    Poly p;
    p.terms_[e] = c;
    return p;
  }
  static Poly variable(int axis) {
    Exps e{0, 0, 0};
    e[axis] = 1;
    return monomial(e);
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
    return r;
  }
  Poly operator*(double s) const {
    Poly r;
    for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + o * -1.0; }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [e1, c1] : terms_) {
      for (const auto& [e2, c2] : o.terms_) r.terms_[{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}] += c1 * c2;
    }
    return r;
  }
  Poly pow(int k) const {
    Poly r = constant(1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  Poly derivative(int axis) const {
    Poly r;
    for (const auto& [e, c] : terms_) {
      if (e[axis] == 0) continue;
      Exps d = e;
      --d[axis];
      r.terms_[d] += c * e[axis];
    }
    return r;
  }

  Poly laplacian(int n) const {
    Poly r;
    for (int a = 0; a < n; ++a) r = r + derivative(a).derivative(a);
    return r;
  }

  double operator()(const Point& p) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (int a = 0; a < p.dim(); ++a) t *= std::pow(p[a], e[a]);
      s += t;
    }
    return s;
  }

  bool zero() const {
    for (const auto& [e, c] : terms_) {
      if (c != 0.0) return false;
    }
    return true;
  }

 private:
  std::map<Exps, double> terms_;
};

/// (x - c)^2 summed over the first n axes, raised to the p-th power.
inline Poly radial(const Point& c, int p) {
  Poly r2;
  for (int a = 0; a < c.dim(); ++a) {
    const Poly d = Poly::variable(a) - Poly::constant(c[a]);
    r2 = r2 + d * d;
  }
  return r2.pow(p);
}

/// Real and imaginary parts of (x + i y)^m.
inline std::array<Poly, 2> complex_power(int m) {
  Poly re = Poly::constant(1.0);
  Poly im;
  const Poly x = Poly::variable(0);
  const Poly y = Poly::variable(1);
  for (int i = 0; i < m; ++i) {
    const Poly next_re = re * x - im * y;
    const Poly next_im = re * y + im * x;
    re = next_re;
    im = next_im;
  }
  return {re, im};
}

/// Pizzetti series: S_a(r) = sum_k Delta^k u(a) r^{2k} / (2^k k! n (n+2) ... (n+2k-2)).
inline double sphere_mean(const Poly& u, int n, const Point& a, double r) {
  double sum = 0.0;
  Poly term = u;
  double denom = 1.0;
  for (int k = 0; !term.zero() && k < 64; ++k) {
    if (k > 0) denom *= 2.0 * k * (n + 2.0 * (k - 1));
    sum += term(a) * std::pow(r, 2 * k) / denom;
    term = term.laplacian(n);
  }
  return sum;
}

/// B_a(r) = sum_k Delta^k u(a) r^{2k} / (2^k k! (n+2) (n+4) ... (n+2k)).
inline double ball_mean(const Poly& u, int n, const Point& a, double r) {
  double sum = 0.0;
  Poly term = u;
  double denom = 1.0;
  for (int k = 0; !term.zero() && k < 64; ++k) {
    if (k > 0) denom *= 2.0 * k * (n + 2.0 * k);
    sum += term(a) * std::pow(r, 2 * k) / denom;
    term = term.laplacian(n);
  }
  return sum;
}

/// Ball mean in the plane by composite Simpson in r (weight r) and the
/// trapezoid rule in theta.
inline double polar_ball_mean(const std::function<double(const Point&)>& f, const Point& c, double radius,
                              int nr = 200, int nt = 256) {
  double sum = 0.0;
  const double dr = radius / nr;
  for (int i = 0; i <= nr; ++i) {
    const double r = i * dr;
    const double w = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double ring = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double t = 2.0 * M_PI * j / nt;
      ring += f(Point{c[0] + r * std::cos(t), c[1] + r * std::sin(t)});
    }
    sum += w * r * ring / nt;
  }
  return 2.0 * sum * dr / 3.0 / (radius * radius);
}

/// Torsion function of a ball of radius R in R^n centred at c.
inline double ball_torsion(const Point& c, double R, const Point& x) {
  return (R * R - (x - c).norm2()) / (2.0 * c.dim());
}

/// Torsion function of the annulus r_in < |x| < r_out in the plane.
inline double annulus_torsion(double r_in, double r_out, double r) {
  const double a = (r_in * r_in - r_out * r_out) / (4.0 * std::log(r_out / r_in));
  return (r_out * r_out - r * r) / 4.0 + a * std::log(r_out / r);
}

/// Boundary flux of the unit-square torsion function along the side y = 0,
/// from the single-series solution.
inline double square_flux(double x, int terms = 200000) {
  double s = 0.0;
  for (int n = 1; n < terms; n += 2) {
    s += 4.0 / (M_PI * M_PI * n * n) * std::tanh(n * M_PI / 2.0) * std::sin(n * M_PI * x);
  }
  return s;
}

/// max q |dOmega| / |Omega| for the unit square (attained at side midpoints).
inline double square_c2() { return 4.0 * square_flux(0.5); }

/// Serrin deficit of the unit square via Parseval on one side.
inline double square_deficit(int terms = 200000) {
  double s = 0.0;
  for (int n = 1; n < terms; n += 2) {
    const double b = 4.0 * std::tanh(n * M_PI / 2.0) / (M_PI * M_PI * n * n);
    s += 0.5 * b * b;
  }
  return s - 1.0 / 16.0;
}

/// max q |dOmega| / |Omega| for the 2 x 1 rectangle (midpoint of a long side).
inline double rectangle_2x1_c2(int terms = 2001) {
  double q = 0.5;
  for (int n = 1; n < terms; n += 2) q -= 4.0 / (M_PI * M_PI * n * n) / std::cosh(std::min(n * M_PI, 700.0));
  return 3.0 * q;
}

/// Seeded generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Point point_in_box(int n, double lo, double hi) {
    Point p = Point::zeros(n);
    for (int a = 0; a < n; ++a) p[a] = uniform(lo, hi);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oracle
