#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace meanfield {

inline constexpr int kMaxDim = 3;

/// A point (or vector) in R^n for n in {1, 2, 3}.
class Point {
 public:
  Point() = default;

  Point(std::initializer_list<double> coords) {
    if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDim)) {
      throw std::invalid_argument("point dimension must be 1, 2 or 3");
    }
    dim_ = static_cast<int>(coords.size());
    int i = 0;
    for (double c : coords) x_[i++] = c;
  }

  static Point zeros(int dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw std::invalid_argument("point dimension must be 1, 2 or 3");
    }
    Point p;
    p.dim_ = dim;
    return p;
  }

  static Point unit(int dim, int axis, double sign = 1.0) {
    Point p = zeros(dim);
    p.x_[axis] = sign;
    return p;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return x_[i]; }
  double& operator[](int i) { return x_[i]; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) x_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator-(Point a) { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i) {
      if (a.x_[i] != b.x_[i]) return false;
    }
    return true;
  }

  double dot(const Point& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += x_[i] * o.x_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  bool finite() const {
    for (int i = 0; i < dim_; ++i) {
      if (!std::isfinite(x_[i])) return false;
    }
    return true;
  }

  std::string str() const {
    std::string out = "(";
    char buf[32];
    for (int i = 0; i < dim_; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", x_[i]);
      if (i) out += ", ";
      out += buf;
    }
    return out + ")";
  }

 private:
  std::array<double, kMaxDim> x_{};
  int dim_ = 0;
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

inline void require_dim(const Point& p, int dim, const char* what) {
  if (p.dim() != dim) {
    throw std::invalid_argument(std::string("dimension mismatch: ") + what + " has dimension " +
                                std::to_string(p.dim()) + ", expected " + std::to_string(dim));
  }
}

/// Closed ball B(center, radius).
struct BallSpec {
  Point center;
  double radius = 0.0;

  BallSpec() = default;
  BallSpec(Point c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("ball radius must be positive and finite");
    }
    if (!c.finite()) throw std::invalid_argument("ball center must be finite");
  }

  int dim() const { return center.dim(); }
};

/// Volume of the unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Area of the unit sphere in R^n (n * omega_n); 2 for n = 1.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace meanfield
