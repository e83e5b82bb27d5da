#include "meanfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace meanfield {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double rectangle_sd(const Rectangle& r, const Point& p) {
  double outside = 0.0;
  double inside = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < p.dim(); ++a) {
    const double q = std::max(r.lo[a] - p[a], p[a] - r.hi[a]);
    outside += q > 0.0 ? q * q : 0.0;
    inside = std::max(inside, q);
  }
  return std::sqrt(outside) + std::min(inside, 0.0);
}

double sdf_grid_sd(const GridSamples& g, const Point& p) {
  // Outside the sample box: distance to the box plus the clamped sample.
  double excess = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double q = std::max(g.lo[a] - p[a], p[a] - g.hi[a]);
    if (q > 0.0) excess += q * q;
  }
  return g.interpolate(p) + std::sqrt(excess);
}

double diameter(const DomainSpec& spec) {
  const auto [lo, hi] = spec.bounding_box();
  return (hi - lo).norm();
}

// Root of sd along the segment from an interior point to an exterior point.
Point boundary_crossing(const DomainSpec& spec, const Point& inside, const Point& outside) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Point step = outside - inside;
  for (int it = 0; it < 80 && t1 - t0 > 1e-17; ++it) {
    const double tm = 0.5 * (t0 + t1);
    if (signed_distance(spec, inside + tm * step) < 0.0) {
      t0 = tm;
    } else {
      t1 = tm;
    }
  }
  return inside + (0.5 * (t0 + t1)) * step;
}

}  // namespace

DomainSpec DomainSpec::interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("interval bounds must be finite with a < b");
  }
  return DomainSpec(Interval{a, b}, 1);
}

DomainSpec DomainSpec::rectangle(const Point& lo, const Point& hi) {
  if (lo.dim() != hi.dim() || lo.dim() < 2) {
    throw std::invalid_argument("rectangle corners must share dimension 2 or 3");
  }
  for (int a = 0; a < lo.dim(); ++a) {
    if (!(lo[a] < hi[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
      throw std::invalid_argument("rectangle bounds must be finite with lo < hi");
    }
  }
  return DomainSpec(Rectangle{lo, hi}, lo.dim());
}

DomainSpec DomainSpec::disk(const Point& center, double radius) {
  if (center.dim() < 2) throw std::invalid_argument("disk needs dimension 2 or 3 (use interval in 1-D)");
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.finite()) {
    throw std::invalid_argument("disk radius must be positive");
  }
  return DomainSpec(Disk{center, radius}, center.dim());
}

DomainSpec DomainSpec::annulus(const Point& center, double r_in, double r_out) {
  if (center.dim() < 2) throw std::invalid_argument("annulus needs dimension 2 or 3");
  if (!(r_in > 0.0) || !(r_in < r_out) || !std::isfinite(r_out) || !center.finite()) {
    throw std::invalid_argument("annulus radii must satisfy 0 < r_in < r_out");
  }
  return DomainSpec(Annulus{center, r_in, r_out}, center.dim());
}

DomainSpec DomainSpec::sdf_grid(GridSamples samples) {
  samples.validate();
  const bool any_inside =
      std::any_of(samples.values.begin(), samples.values.end(), [](double v) { return v < 0.0; });
  if (!any_inside) throw std::invalid_argument("degenerate sdf_grid: no negative samples");
  const int dim = samples.dim;
  return DomainSpec(SdfGrid{std::make_shared<const GridSamples>(std::move(samples))}, dim);
}

std::string DomainSpec::name() const {
  return std::visit(Overloaded{[](const Interval&) { return std::string("interval"); },
                               [](const Rectangle&) { return std::string("rectangle"); },
                               [](const Disk&) { return std::string("disk"); },
                               [](const Annulus&) { return std::string("annulus"); },
                               [](const SdfGrid&) { return std::string("sdf_grid"); }},
                    shape_);
}

std::pair<Point, Point> DomainSpec::bounding_box() const {
  return std::visit(
      Overloaded{[](const Interval& s) { return std::pair{Point{s.a}, Point{s.b}}; },
                 [](const Rectangle& s) { return std::pair{s.lo, s.hi}; },
                 [](const Disk& s) {
                   Point r = Point::zeros(s.center.dim());
                   for (int a = 0; a < r.dim(); ++a) r[a] = s.radius;
                   return std::pair{s.center - r, s.center + r};
                 },
                 [](const Annulus& s) {
                   Point r = Point::zeros(s.center.dim());
                   for (int a = 0; a < r.dim(); ++a) r[a] = s.r_out;
                   return std::pair{s.center - r, s.center + r};
                 },
                 [](const SdfGrid& s) {
                   Point lo = Point::zeros(s.samples->dim);
                   Point hi = lo;
                   for (int a = 0; a < lo.dim(); ++a) {
                     lo[a] = s.samples->lo[a];
                     hi[a] = s.samples->hi[a];
                   }
                   return std::pair{lo, hi};
                 }},
      shape_);
}

double DomainSpec::volume() const {
  const int n = dim_;
  return std::visit(Overloaded{[](const Interval& s) { return s.b - s.a; },
                               [](const Rectangle& s) {
                                 double v = 1.0;
                                 for (int a = 0; a < s.lo.dim(); ++a) v *= s.hi[a] - s.lo[a];
                                 return v;
                               },
                               [n](const Disk& s) { return unit_ball_volume(n) * std::pow(s.radius, n); },
                               [n](const Annulus& s) {
                                 return unit_ball_volume(n) * (std::pow(s.r_out, n) - std::pow(s.r_in, n));
                               },
                               [](const SdfGrid&) -> double {
                                 throw std::invalid_argument("sdf_grid domains have no analytic volume");
                               }},
                    shape_);
}

double DomainSpec::surface() const {
  const int n = dim_;
  return std::visit(Overloaded{[](const Interval&) { return 2.0; },
                               [](const Rectangle& s) {
                                 const double lx = s.hi[0] - s.lo[0];
                                 const double ly = s.hi[1] - s.lo[1];
                                 if (s.lo.dim() == 2) return 2.0 * (lx + ly);
                                 const double lz = s.hi[2] - s.lo[2];
                                 return 2.0 * (lx * ly + ly * lz + lx * lz);
                               },
                               [n](const Disk& s) { return unit_sphere_area(n) * std::pow(s.radius, n - 1); },
                               [n](const Annulus& s) {
                                 return unit_sphere_area(n) * (std::pow(s.r_out, n - 1) + std::pow(s.r_in, n - 1));
                               },
                               [](const SdfGrid&) -> double {
                                 throw std::invalid_argument("sdf_grid domains have no analytic surface");
                               }},
                    shape_);
}

double signed_distance(const DomainSpec& spec, const Point& p) {
  require_dim(p, spec.dim(), "point");
  return std::visit(Overloaded{[&](const Interval& s) { return std::max(s.a - p[0], p[0] - s.b); },
                               [&](const Rectangle& s) { return rectangle_sd(s, p); },
                               [&](const Disk& s) { return distance(p, s.center) - s.radius; },
                               [&](const Annulus& s) {
                                 const double r = distance(p, s.center);
                                 return std::max(r - s.r_out, s.r_in - r);
                               },
                               [&](const SdfGrid& s) { return sdf_grid_sd(*s.samples, p); }},
                    spec.variant());
}

Point outward_normal(const DomainSpec& spec, const Point& p) {
  require_dim(p, spec.dim(), "point");
  const int n = spec.dim();
  auto radial = [n](const Point& d) {
    const double r = d.norm();
    return r > 0.0 ? d * (1.0 / r) : Point::unit(n, 0);
  };
  return std::visit(
      Overloaded{
          [&](const Interval& s) { return Point{p[0] < 0.5 * (s.a + s.b) ? -1.0 : 1.0}; },
          [&](const Rectangle& s) {
            const double tol = 1e-9 * std::max(1.0, diameter(spec));
            Point q = Point::zeros(n);
            Point sign = Point::zeros(n);
            double qmax = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < n; ++a) {
              const double below = s.lo[a] - p[a];
              const double above = p[a] - s.hi[a];
              q[a] = std::max(below, above);
              sign[a] = above >= below ? 1.0 : -1.0;
              qmax = std::max(qmax, q[a]);
            }
            Point g = Point::zeros(n);
            for (int a = 0; a < n; ++a) {
              if (qmax > tol) {
                g[a] = sign[a] * std::max(q[a], 0.0);
              } else if (q[a] >= qmax - tol) {
                g[a] = sign[a];
              }
            }
            return g * (1.0 / g.norm());
          },
          [&](const Disk& s) { return radial(p - s.center); },
          [&](const Annulus& s) {
            const Point d = p - s.center;
            const double r = d.norm();
            const Point u = radial(d);
            return r - s.r_out >= s.r_in - r ? u : -u;
          },
          [&](const SdfGrid& s) {
            const GridSamples& g = *s.samples;
            Point grad = Point::zeros(n);
            for (int a = 0; a < n; ++a) {
              const double step = 0.5 * g.spacing(a);
              const Point e = Point::unit(n, a, step);
              grad[a] = (sdf_grid_sd(g, p + e) - sdf_grid_sd(g, p - e)) / (2.0 * step);
            }
            const double len = grad.norm();
            if (!(len > 0.0)) throw std::runtime_error("sdf_grid gradient vanishes at " + p.str());
            return grad * (1.0 / len);
          }},
      spec.variant());
}

bool contains_closed_ball(const DomainSpec& spec, const BallSpec& ball) {
  require_dim(ball.center, spec.dim(), "ball center");
  return signed_distance(spec, ball.center) + ball.radius < -1e-12;
}

Point exterior_tangent_point(const DomainSpec& spec, const Point& y, double delta) {
  require_dim(y, spec.dim(), "boundary point");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  const double scale = std::max(1.0, diameter(spec));
  if (std::abs(signed_distance(spec, y)) > 1e-8 * scale) {
    throw std::invalid_argument("point " + y.str() + " is not on the boundary");
  }
  if (const auto* ann = std::get_if<Annulus>(&spec.variant())) {
    const double r = distance(y, ann->center);
    const bool inner = ann->r_in - r > r - ann->r_out;
    if (inner && !(delta < ann->r_in)) {
      throw std::invalid_argument("delta violates the exterior-sphere bound (inner radius " +
                                  std::to_string(ann->r_in) + ")");
    }
  }
  const Point ybar = y + delta * outward_normal(spec, y);
  const double sd = signed_distance(spec, ybar);
  double tol = 1e-10 * std::max(1.0, delta);
  if (const auto* g = std::get_if<SdfGrid>(&spec.variant())) {
    for (int a = 0; a < g->samples->dim; ++a) tol = std::max(tol, g->samples->spacing(a));
  }
  if (std::abs(sd - delta) > tol) {
    throw std::invalid_argument("delta violates the exterior-sphere bound at " + y.str());
  }
  return ybar;
}

std::array<int, kMaxDim> DiscretizedDomain::grid_index(std::size_t flat) const {
  std::array<int, kMaxDim> ijk{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    ijk[a] = static_cast<int>(flat % count_[a]);
    flat /= count_[a];
  }
  return ijk;
}

Point DiscretizedDomain::node_point(std::size_t flat) const {
  const auto ijk = grid_index(flat);
  Point p = origin_;
  for (int a = 0; a < dim_; ++a) p[a] += ijk[a] * h_;
  return p;
}

namespace {

struct VertexAcc {
  Point point;
  double surface = 0.0;
  double volume = 0.0;
};

struct CellVertex {
  Point point;
  bool on_boundary = false;
  std::uint64_t key = 0;  // node: flat * 3; crossing: base * 3 + axis + 1
  int interior = -1;      // interior ordinal for interior nodes
};

}  // namespace

DiscretizedDomain discretize(const DomainSpec& spec, double h) {
  const int n = spec.dim();
  if (n > 2) throw std::invalid_argument("discretize supports dimensions 1 and 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing must be positive");

  DiscretizedDomain d(spec);
  d.dim_ = n;
  d.h_ = h;
  const auto [lo, hi] = spec.bounding_box();
  d.origin_ = lo;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) {
    d.origin_[a] = lo[a] - h;
    const double cells = std::ceil((hi[a] - lo[a]) / h - 1e-9);
    if (cells > 1e7) throw std::invalid_argument("grid spacing too small");
    d.count_[a] = static_cast<int>(cells) + 3;
    total *= static_cast<std::size_t>(d.count_[a]);
  }
  if (total > 60'000'000) throw std::invalid_argument("grid spacing too small: too many nodes");

  const double eps = 1e-8 * h;
  d.kind_.assign(total, NodeKind::kExterior);
  d.interior_of_node_.assign(total, -1);
  for (std::size_t f = 0; f < total; ++f) {
    const double sd = signed_distance(spec, d.node_point(f));
    if (sd < -eps) {
      d.kind_[f] = NodeKind::kInterior;
      d.interior_of_node_[f] = static_cast<int>(d.interior_.size());
      d.interior_.push_back(f);
    } else if (sd <= eps) {
      d.kind_[f] = NodeKind::kBoundary;
    }
  }
  const std::size_t min_nodes = n == 1 ? 3 : 10;
  if (d.interior_.size() < min_nodes) {
    throw std::invalid_argument("h too large: only " + std::to_string(d.interior_.size()) + " interior nodes (need " +
                                std::to_string(min_nodes) + ")");
  }

  std::array<std::size_t, kMaxDim> stride{1, static_cast<std::size_t>(d.count_[0]), 0};
  std::map<std::uint64_t, Point> crossings;
  auto crossing = [&](std::size_t inside, std::size_t outside, int axis) -> const Point& {
    const std::uint64_t key = std::min(inside, outside) * 3 + axis + 1;
    auto it = crossings.find(key);
    if (it == crossings.end()) {
      it = crossings.emplace(key, boundary_crossing(spec, d.node_point(inside), d.node_point(outside))).first;
    }
    return it->second;
  };

  d.legs_.resize(d.interior_.size() * n * 2);
  for (std::size_t i = 0; i < d.interior_.size(); ++i) {
    const std::size_t f = d.interior_[i];
    for (int a = 0; a < n; ++a) {
      for (int dir = 0; dir < 2; ++dir) {
        const std::size_t g = dir ? f + stride[a] : f - stride[a];
        Leg& leg = d.legs_[(i * n + a) * 2 + dir];
        switch (d.kind_[g]) {
          case NodeKind::kInterior:
            leg = Leg{d.interior_of_node_[g], h};
            break;
          case NodeKind::kBoundary:
            leg = Leg{-1, h};
            break;
          case NodeKind::kExterior:
            leg = Leg{-1, distance(crossing(f, g, a), d.node_point(f))};
            break;
        }
      }
    }
  }

  std::vector<double> interior_volume(d.interior_.size(), 0.0);
  std::map<std::uint64_t, VertexAcc> boundary_acc;

  auto node_vertex = [&](std::size_t f) {
    CellVertex v;
    v.point = d.node_point(f);
    v.on_boundary = d.kind_[f] == NodeKind::kBoundary;
    v.key = f * 3;
    v.interior = d.interior_of_node_[f];
    return v;
  };

  // Walk each cell (a segment in 1-D) around its corners, collecting the
  // clipped polygon of the domain inside the cell.
  std::vector<std::size_t> corners;
  std::vector<int> edge_axis;
  std::vector<CellVertex> poly;
  const int cx = d.count_[0] - 1;
  const int cy = n == 2 ? d.count_[1] - 1 : 1;
  for (int j = 0; j < cy; ++j) {
    for (int i = 0; i < cx; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) + stride[1] * j;
      if (n == 1) {
        corners = {base, base + 1};
        edge_axis = {0, 0};
      } else {
        corners = {base, base + 1, base + 1 + stride[1], base + stride[1]};
        edge_axis = {0, 1, 0, 1};
      }
      const bool any_interior = std::any_of(corners.begin(), corners.end(),
                                            [&](std::size_t f) { return d.kind_[f] == NodeKind::kInterior; });
      if (!any_interior) continue;

      poly.clear();
      const std::size_t m = corners.size();
      const std::size_t edges = n == 1 ? 1 : m;
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t u = corners[c];
        if (d.kind_[u] != NodeKind::kExterior) poly.push_back(node_vertex(u));
        if (c >= edges) continue;
        const std::size_t w = corners[(c + 1) % m];
        const bool u_in = d.kind_[u] == NodeKind::kInterior;
        const bool w_in = d.kind_[w] == NodeKind::kInterior;
        const bool u_out = d.kind_[u] == NodeKind::kExterior;
        const bool w_out = d.kind_[w] == NodeKind::kExterior;
        if ((u_in && w_out) || (w_in && u_out)) {
          CellVertex v;
          v.point = u_in ? crossing(u, w, edge_axis[c]) : crossing(w, u, edge_axis[c]);
          v.on_boundary = true;
          v.key = std::min(u, w) * 3 + edge_axis[c] + 1;
          poly.push_back(v);
        }
      }

      double measure = 0.0;
      if (n == 1) {
        measure = std::abs(poly.back().point[0] - poly.front().point[0]);
      } else {
        for (std::size_t k = 0; k < poly.size(); ++k) {
          const Point& p = poly[k].point;
          const Point& q = poly[(k + 1) % poly.size()].point;
          measure += p[0] * q[1] - q[0] * p[1];
        }
        measure = 0.5 * std::abs(measure);
      }
      d.volume_ += measure;
      const double share = measure / static_cast<double>(poly.size());
      for (const CellVertex& v : poly) {
        if (v.interior >= 0) {
          interior_volume[v.interior] += share;
        } else {
          auto& acc = boundary_acc[v.key];
          acc.point = v.point;
          acc.volume += share;
        }
      }

      if (n == 1) {
        for (const CellVertex& v : poly) {
          if (v.on_boundary) boundary_acc[v.key].surface = 1.0;
        }
      } else {
        for (std::size_t k = 0; k < poly.size(); ++k) {
          const CellVertex& p = poly[k];
          const CellVertex& q = poly[(k + 1) % poly.size()];
          if (!p.on_boundary || !q.on_boundary || p.key == q.key) continue;
          const double half = 0.5 * distance(p.point, q.point);
          boundary_acc[p.key].surface += half;
          boundary_acc[q.key].surface += half;
        }
      }
    }
  }

  for (std::size_t i = 0; i < d.interior_.size(); ++i) {
    d.volume_samples_.push_back({d.interior_point(i), interior_volume[i]});
  }
  for (const auto& [key, acc] : boundary_acc) {
    if (acc.volume > 0.0) d.volume_samples_.push_back({acc.point, acc.volume});
    if (acc.surface > 0.0) {
      d.boundary_.push_back({acc.point, outward_normal(spec, acc.point), acc.surface});
      d.surface_ += acc.surface;
    }
  }
  return d;
}

std::vector<BoundarySample> sample_boundary(const DomainSpec& spec, std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample_boundary needs a positive count");
  std::vector<BoundarySample> out;
  const int n = spec.dim();
  if (const auto* s = std::get_if<Interval>(&spec.variant())) {
    const double reach = 0.5 * (s->b - s->a);
    out.push_back({Point{s->a}, Point{-1.0}, 1.0, 0.0, reach});
    out.push_back({Point{s->b}, Point{1.0}, 1.0, 0.0, reach});
    return out;
  }
  if (n != 2) throw std::invalid_argument("sample_boundary supports intervals and 2-D analytic domains");

  auto circle = [&](const Point& c, double r, std::size_t m, double sign, double reach) {
    for (std::size_t j = 0; j < m; ++j) {
      const double t = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m);
      const Point u{std::cos(t), std::sin(t)};
      out.push_back({c + r * u, sign * u, 2.0 * M_PI * r / static_cast<double>(m), sign / r, reach});
    }
  };

  if (const auto* s = std::get_if<Disk>(&spec.variant())) {
    circle(s->center, s->radius, count, 1.0, s->radius);
  } else if (const auto* s = std::get_if<Annulus>(&spec.variant())) {
    const double reach = 0.5 * (s->r_out - s->r_in);
    auto outer = static_cast<std::size_t>(std::llround(static_cast<double>(count) * s->r_out / (s->r_out + s->r_in)));
    outer = std::clamp<std::size_t>(outer, 1, std::max<std::size_t>(1, count - 1));
    circle(s->center, s->r_out, outer, 1.0, reach);
    if (count > outer) circle(s->center, s->r_in, count - outer, -1.0, reach);
  } else if (const auto* s = std::get_if<Rectangle>(&spec.variant())) {
    const double lx = s->hi[0] - s->lo[0];
    const double ly = s->hi[1] - s->lo[1];
    const double perimeter = 2.0 * (lx + ly);
    const double w = perimeter / static_cast<double>(count);
    const double corner_tol = 1e-12 * perimeter;
    // Counter-clockwise from lo: bottom, right, top, left.
    const std::array<Point, 4> start{s->lo, Point{s->hi[0], s->lo[1]}, s->hi, Point{s->lo[0], s->hi[1]}};
    const std::array<Point, 4> dir{Point{1.0, 0.0}, Point{0.0, 1.0}, Point{-1.0, 0.0}, Point{0.0, -1.0}};
    const std::array<Point, 4> normal{Point{0.0, -1.0}, Point{1.0, 0.0}, Point{0.0, 1.0}, Point{-1.0, 0.0}};
    const std::array<double, 4> length{lx, ly, lx, ly};
    for (std::size_t j = 0; j < count; ++j) {
      double s_arc = w * static_cast<double>(j);
      int side = 0;
      while (side < 3 && s_arc >= length[side] - corner_tol) {
        s_arc -= length[side];
        ++side;
      }
      s_arc = std::max(s_arc, 0.0);
      Point nu = normal[side];
      if (s_arc <= corner_tol) {
        nu = normal[side] + normal[(side + 3) % 4];
        nu = nu * (1.0 / nu.norm());
      }
      const double across = 0.5 * length[(side + 1) % 4];
      const double reach = std::min({s_arc, length[side] - s_arc, across});
      out.push_back({start[side] + s_arc * dir[side], nu, w, 0.0, reach});
    }
  } else {
    throw std::invalid_argument("sample_boundary supports intervals and 2-D analytic domains");
  }
  return out;
}

}  // namespace meanfield
