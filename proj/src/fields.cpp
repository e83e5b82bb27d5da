#include "meanfield/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace meanfield {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

class Constant final : public detail::FieldImpl {
 public:
  Constant(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  double eval(const Point&) const override { return c_; }
  double laplacian(const Point&) const override { return 0.0; }
  std::string describe() const override { return "constant(" + num(c_) + ")"; }

 private:
  int dim_;
  double c_;
};

class Monomial final : public detail::FieldImpl {
 public:
  explicit Monomial(std::vector<int> e) : e_(std::move(e)) {}
  int dim() const override { return static_cast<int>(e_.size()); }
  double eval(const Point& p) const override {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= ipow(p[i], e_[i]);
    return v;
  }
  double laplacian(const Point& p) const override {
    double sum = 0.0;
    for (int i = 0; i < dim(); ++i) {
      if (e_[i] < 2) continue;
      double term = e_[i] * (e_[i] - 1.0) * ipow(p[i], e_[i] - 2);
      for (int j = 0; j < dim(); ++j) {
        if (j != i) term *= ipow(p[j], e_[j]);
      }
      sum += term;
    }
    return sum;
  }
  std::string describe() const override {
    std::string s = "monomial(";
    for (std::size_t i = 0; i < e_.size(); ++i) s += (i ? "," : "") + std::to_string(e_[i]);
    return s + ")";
  }

 private:
  std::vector<int> e_;
};

class HarmonicPoly final : public detail::FieldImpl {
 public:
  HarmonicPoly(int dim, HarmonicPart part, int degree, double coef, std::string name)
      : dim_(dim), part_(part), degree_(degree), coef_(coef), name_(std::move(name)) {}
  int dim() const override { return dim_; }
  double eval(const Point& p) const override {
    const double x = p[0];
    const double y = p[1];
    const bool re = part_ == HarmonicPart::kReal;
    double v = 0.0;
    switch (degree_) {
      case 0: v = re ? 1.0 : 0.0; break;
      case 1: v = re ? x : y; break;
      case 2: v = re ? x * x - y * y : 2.0 * x * y; break;
      case 3: v = re ? x * x * x - 3.0 * x * y * y : 3.0 * x * x * y - y * y * y; break;
      case 4: {
        const double x2 = x * x;
        const double y2 = y * y;
        v = re ? x2 * x2 - 6.0 * x2 * y2 + y2 * y2 : 4.0 * x * y * (x2 - y2);
        break;
      }
    }
    return coef_ * v;
  }
  double laplacian(const Point&) const override { return 0.0; }
  std::string describe() const override { return "harmonic_poly(" + name_ + ")"; }

 private:
  int dim_;
  HarmonicPart part_;
  int degree_;
  double coef_;
  std::string name_;
};

class ExpCos final : public detail::FieldImpl {
 public:
  explicit ExpCos(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  double eval(const Point& p) const override { return std::exp(p[0]) * std::cos(p[1]); }
  double laplacian(const Point&) const override { return 0.0; }
  std::string describe() const override { return "exp_cos"; }

 private:
  int dim_;
};

class RadialPower final : public detail::FieldImpl {
 public:
  RadialPower(Point c, int p) : c_(c), p_(p) {}
  int dim() const override { return c_.dim(); }
  double eval(const Point& x) const override { return ipow((x - c_).norm2(), p_); }
  double laplacian(const Point& x) const override {
    const int n = dim();
    if (p_ == 0) return 0.0;
    return 2.0 * p_ * (2.0 * p_ + n - 2.0) * ipow((x - c_).norm2(), p_ - 1);
  }
  std::string describe() const override {
    return "radial_power(center=" + c_.str() + ",exponent=" + std::to_string(2 * p_) + ")";
  }

 private:
  Point c_;
  int p_;
};

class FundamentalShift final : public detail::FieldImpl {
 public:
  FundamentalShift(Point pole, double scale, double amplitude, double offset)
      : pole_(pole), scale_(scale), amplitude_(amplitude), offset_(offset) {}
  int dim() const override { return pole_.dim(); }
  double eval(const Point& p) const override {
    const double r = distance(p, pole_);
    if (r == 0.0 && dim() >= 2) {
      throw std::domain_error("evaluation at fundamental-solution singularity " + pole_.str());
    }
    return amplitude_ * fundamental_solution(dim(), r / scale_) + offset_;
  }
  double laplacian(const Point& p) const override {
    if (distance(p, pole_) == 0.0) throw NoExactLaplacian("Laplacian requested at the pole " + pole_.str());
    return 0.0;
  }
  bool defined_on(const BallSpec& ball) const override {
    return ball.dim() == dim() && (dim() == 1 || distance(ball.center, pole_) > ball.radius);
  }
  bool smooth() const override { return dim() >= 2; }
  std::string describe() const override {
    return "fundamental_shift(pole=" + pole_.str() + ",scale=" + num(scale_) + ",amplitude=" + num(amplitude_) +
           ",offset=" + num(offset_) + ")";
  }

 private:
  Point pole_;
  double scale_;
  double amplitude_;
  double offset_;
};

class OneDTent final : public detail::FieldImpl {
 public:
  explicit OneDTent(int k) : k_(k) {}
  int dim() const override { return 1; }
  double eval(const Point& p) const override {
    const double k = k_;
    const double x = p[0];
    return std::max({1.0, k - k * k * x, k + k * k * (x - 1.0)});
  }
  double laplacian(const Point& p) const override {
    const double kink = (k_ - 1.0) / (static_cast<double>(k_) * k_);
    const double x = p[0];
    if (std::abs(x - kink) <= 1e-12 || std::abs(x - (1.0 - kink)) <= 1e-12) {
      throw NoExactLaplacian("Laplacian requested on a kink of the tent");
    }
    return 0.0;
  }
  bool smooth() const override { return false; }
  std::string describe() const override { return "one_d_tent(k=" + std::to_string(k_) + ")"; }

 private:
  int k_;
};

class Affine final : public detail::FieldImpl {
 public:
  Affine(ScalarField f, double shift, double scale) : f_(std::move(f)), shift_(shift), scale_(scale) {}
  int dim() const override { return f_.dim(); }
  double eval(const Point& p) const override { return scale_ * f_(p) + shift_; }
  double laplacian(const Point& p) const override { return scale_ * f_.laplacian(p); }
  bool defined_on(const BallSpec& ball) const override { return f_.defined_on(ball); }
  bool smooth() const override { return f_.smooth(); }
  std::string describe() const override {
    return "affine_transform(" + f_.describe() + ",shift=" + num(shift_) + ",scale=" + num(scale_) + ")";
  }

 private:
  ScalarField f_;
  double shift_;
  double scale_;
};

class MaxCombination final : public detail::FieldImpl {
 public:
  explicit MaxCombination(std::vector<ScalarField> fields) : fields_(std::move(fields)) {}
  int dim() const override { return fields_.front().dim(); }
  double eval(const Point& p) const override {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& f : fields_) v = std::max(v, f(p));
    return v;
  }
  double laplacian(const Point& p) const override {
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      const double v = fields_[i](p);
      if (v > best) {
        second = best;
        best = v;
        arg = i;
      } else if (v > second) {
        second = v;
      }
    }
    if (best - second <= 1e-12 * std::max(1.0, std::abs(best))) {
      throw NoExactLaplacian("Laplacian requested on a kink set of a max-combination at " + p.str());
    }
    return fields_[arg].laplacian(p);
  }
  bool defined_on(const BallSpec& ball) const override {
    return std::all_of(fields_.begin(), fields_.end(), [&](const ScalarField& f) { return f.defined_on(ball); });
  }
  bool smooth() const override { return fields_.size() == 1 && fields_.front().smooth(); }
  std::string describe() const override {
    std::string s = "max_combination(";
    for (std::size_t i = 0; i < fields_.size(); ++i) s += (i ? "," : "") + fields_[i].describe();
    return s + ")";
  }

 private:
  std::vector<ScalarField> fields_;
};

class GridField final : public detail::FieldImpl {
 public:
  explicit GridField(GridSamples g) : g_(std::move(g)) {}
  int dim() const override { return g_.dim; }
  double eval(const Point& p) const override {
    if (!g_.covers(p)) throw std::out_of_range("point " + p.str() + " outside the grid field's box");
    return g_.interpolate(p);
  }
  double laplacian(const Point&) const override {
    throw NoExactLaplacian("grid fields have no exact Laplacian");
  }
  bool defined_on(const BallSpec& ball) const override {
    if (ball.dim() != dim()) return false;
    for (int a = 0; a < dim(); ++a) {
      Point e = Point::unit(dim(), a, ball.radius);
      if (!g_.covers(ball.center + e) || !g_.covers(ball.center - e)) return false;
    }
    return true;
  }
  bool smooth() const override { return false; }
  std::string describe() const override {
    std::string s = "grid(n=" + std::to_string(g_.dim) + ",nodes=";
    for (int a = 0; a < g_.dim; ++a) s += (a ? "x" : "") + std::to_string(g_.count[a]);
    return s + ")";
  }

 private:
  GridSamples g_;
};

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("field dimension must be 1, 2 or 3");
}

}  // namespace

double fundamental_solution(int n, double rho) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (n == 1) return rho;
  if (!(rho > 0.0)) throw std::domain_error("fundamental solution is singular at rho = 0");
  if (n == 2) return std::log(rho) / (2.0 * M_PI);
  return -std::pow(rho, 2.0 - n) / ((n - 2.0) * unit_sphere_area(n));
}

ScalarField::ScalarField(std::shared_ptr<const detail::FieldImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("null field");
}

double ScalarField::operator()(const Point& p) const {
  require_dim(p, impl_->dim(), "evaluation point");
  return impl_->eval(p);
}

double ScalarField::laplacian(const Point& p) const {
  require_dim(p, impl_->dim(), "evaluation point");
  return impl_->laplacian(p);
}

ScalarField constant(int dim, double c) {
  check_dim(dim);
  return ScalarField(std::make_shared<Constant>(dim, c));
}

ScalarField monomial(std::vector<int> exponents) {
  check_dim(static_cast<int>(exponents.size()));
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("monomial exponents must be non-negative");
  }
  return ScalarField(std::make_shared<Monomial>(std::move(exponents)));
}

ScalarField harmonic_poly(int dim, HarmonicPart part, int degree) {
  check_dim(dim);
  if (dim < 2) throw std::invalid_argument("harmonic polynomials need dimension >= 2");
  if (degree < 0 || degree > 4) throw std::invalid_argument("harmonic polynomial degree must be 0..4");
  const std::string name = (part == HarmonicPart::kReal ? "re" : "im") + std::to_string(degree);
  return ScalarField(std::make_shared<HarmonicPoly>(dim, part, degree, 1.0, name));
}

ScalarField harmonic_poly(int dim, const std::string& id) {
  check_dim(dim);
  if (dim < 2) throw std::invalid_argument("harmonic polynomials need dimension >= 2");
  if (id == "x2-y2") return ScalarField(std::make_shared<HarmonicPoly>(dim, HarmonicPart::kReal, 2, 1.0, id));
  if (id == "x3-3xy2") return ScalarField(std::make_shared<HarmonicPoly>(dim, HarmonicPart::kReal, 3, 1.0, id));
  if (id == "xy") return ScalarField(std::make_shared<HarmonicPoly>(dim, HarmonicPart::kImag, 2, 0.5, id));
  if (id.size() == 3 && (id.rfind("re", 0) == 0 || id.rfind("im", 0) == 0) && id[2] >= '0' && id[2] <= '4') {
    return harmonic_poly(dim, id[0] == 'r' ? HarmonicPart::kReal : HarmonicPart::kImag, id[2] - '0');
  }
  throw std::invalid_argument("unknown harmonic polynomial '" + id + "'");
}

ScalarField exp_cos(int dim) {
  check_dim(dim);
  if (dim < 2) throw std::invalid_argument("exp_cos needs dimension >= 2");
  return ScalarField(std::make_shared<ExpCos>(dim));
}

ScalarField radial_power(const Point& center, int p) {
  check_dim(center.dim());
  if (p < 0) throw std::invalid_argument("radial power exponent must be non-negative");
  return ScalarField(std::make_shared<RadialPower>(center, p));
}

ScalarField fundamental_shift(const Point& pole, double scale, double amplitude, double offset) {
  check_dim(pole.dim());
  if (!(scale > 0.0)) throw std::invalid_argument("fundamental_shift scale must be positive");
  return ScalarField(std::make_shared<FundamentalShift>(pole, scale, amplitude, offset));
}

ScalarField one_d_tent(int k) {
  if (k < 2) throw std::invalid_argument("tent parameter k must be >= 2");
  return ScalarField(std::make_shared<OneDTent>(k));
}

ScalarField affine_transform(const ScalarField& f, double shift, double scale) {
  return ScalarField(std::make_shared<Affine>(f, shift, scale));
}

ScalarField max_combine(const std::vector<ScalarField>& fields) {
  if (fields.empty()) throw std::invalid_argument("max_combine needs at least one field");
  for (const auto& f : fields) {
    if (f.dim() != fields.front().dim()) throw std::invalid_argument("max_combine fields differ in dimension");
  }
  return ScalarField(std::make_shared<MaxCombination>(fields));
}

ScalarField grid_field(GridSamples samples) {
  samples.validate();
  return ScalarField(std::make_shared<GridField>(std::move(samples)));
}

ScalarField load_grid_field(const std::string& path) { return grid_field(read_grid_file(path)); }

}  // namespace meanfield
