#include "meanfield/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "meanfield/means.hpp"
#include "meanfield/parallel.hpp"

namespace meanfield {

namespace {

void require_blowup_dim(int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("blow-up sequences support dimensions 1 and 2");
}

/// max{1, max_j v_{y_j}}, with the poles bucketed on a square grid whose cell
/// is the support radius, so only the 3^n neighbouring cells can exceed 1.
class BlowupField final : public detail::FieldImpl {
 public:
  BlowupField(int n, int k, double delta, double support, const std::vector<Point>& anchors,
              const std::vector<Point>& poles)
      : n_(n), k_(k), delta_(delta), cell_(support), poles_(poles) {
    const double kk = static_cast<double>(k) * k;
    offsets_.reserve(poles.size());
    for (std::size_t j = 0; j < poles.size(); ++j) {
      offsets_.push_back(kk * fundamental_solution(n, distance(anchors[j], poles[j]) / delta) + k);
      buckets_[key(cell_of(poles[j]))].push_back(static_cast<int>(j));
    }
  }

  int dim() const override { return n_; }

  double eval(const Point& p) const override {
    double v = 1.0;
    visit(p, true, [&](double vj) { v = std::max(v, vj); });
    return v;
  }

  double laplacian(const Point& p) const override {
    double best = 1.0;
    double second = -std::numeric_limits<double>::infinity();
    visit(p, false, [&](double vj) {
      if (vj > best) {
        second = best;
        best = vj;
      } else if (vj > second) {
        second = vj;
      }
    });
    if (best - second <= 1e-12 * std::max(1.0, std::abs(best))) {
      throw NoExactLaplacian("Laplacian requested on a kink set of the blow-up field at " + p.str());
    }
    return 0.0;
  }

  bool defined_on(const BallSpec& ball) const override {
    if (ball.dim() != n_) return false;
    return std::none_of(poles_.begin(), poles_.end(),
                        [&](const Point& pole) { return distance(ball.center, pole) <= ball.radius; });
  }

  bool smooth() const override { return false; }

  std::string describe() const override {
    char buf[128];
    std::snprintf(buf, sizeof buf, "max_combination(blowup k=%d delta=%.17g anchors=%zu, 1)", k_, delta_,
                  poles_.size());
    return buf;
  }

 private:
  using Cell = std::array<std::int64_t, 2>;

  Cell cell_of(const Point& p) const {
    Cell c{0, 0};
    for (int a = 0; a < n_; ++a) c[a] = static_cast<std::int64_t>(std::floor(p[a] / cell_));
    return c;
  }
  static std::int64_t key(const Cell& c) { return c[0] * 4'000'037 + c[1]; }

  /// Calls f with v_j(p) for every pole near p; with `prune`, poles farther
  /// than the support radius (where v_j <= 1) are skipped.
  template <class F>
  void visit(const Point& p, bool prune, F&& f) const {
    require_dim(p, n_, "evaluation point");
    const Cell c = cell_of(p);
    const double kk = static_cast<double>(k_) * k_;
    const double cell2 = cell_ * cell_;
    const int span = n_ == 2 ? 1 : 0;
    for (std::int64_t dy = -span; dy <= span; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const auto it = buckets_.find(key({c[0] + dx, c[1] + dy}));
        if (it == buckets_.end()) continue;
        for (int j : it->second) {
          const double r2 = (p - poles_[j]).norm2();
          if (r2 == 0.0) throw std::domain_error("evaluation at a blow-up pole " + p.str());
          if (prune && r2 >= cell2) continue;
          f(-kk * fundamental_solution(n_, std::sqrt(r2) / delta_) + offsets_[j]);
        }
      }
    }
  }

  int n_;
  int k_;
  double delta_;
  double cell_;
  std::vector<Point> poles_;
  std::vector<double> offsets_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

std::vector<Point> points_of(const std::vector<BoundarySample>& samples) {
  std::vector<Point> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.point);
  return out;
}

}  // namespace

ScalarField blowup_1d(int k) {
  if (k < 2) throw std::invalid_argument("blowup_1d needs k >= 2");
  return one_d_tent(k);
}

double blowup_1d_surface_mean(int k) {
  if (k < 2) throw std::invalid_argument("blowup_1d needs k >= 2");
  return k;
}

double blowup_1d_volume_mean(int k) {
  if (k < 2) throw std::invalid_argument("blowup_1d needs k >= 2");
  const double kd = k;
  const double km1 = kd - 1.0;
  return 1.0 - 2.0 * km1 / (kd * kd) + 2.0 * km1 / kd - km1 * km1 / (kd * kd);
}

double psi_gain_radius(int n, double gain) {
  require_blowup_dim(n);
  if (!(gain >= 0.0)) throw std::invalid_argument("gain must be non-negative");
  return n == 1 ? 1.0 + gain : std::exp(2.0 * M_PI * gain);
}

int blowup_interior_threshold(int n) {
  require_blowup_dim(n);
  const double drop = fundamental_solution(n, 2.0) - fundamental_solution(n, 1.0);
  for (int k = 3; k < 1'000'000; ++k) {
    const double kd = k;
    if (-kd * kd * drop + kd < 1.0) return k;
  }
  throw std::runtime_error("no interior threshold found");
}

Blowup blowup_sequence(const DomainSpec& domain, int k, double delta, const BlowupOptions& options) {
  const int n = domain.dim();
  require_blowup_dim(n);
  if (k <= 2) throw std::invalid_argument("blow-up sequence needs an integer k > 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");

  const double kk = static_cast<double>(k) * k;
  BlowupParams params;
  params.k = k;
  params.delta = delta;
  params.support_radius = delta * psi_gain_radius(n, (k - 1.0) / kk);
  params.patch_radius = delta * (psi_gain_radius(n, 1.0 / kk) - 1.0);

  std::size_t count = n == 1 ? 2 : static_cast<std::size_t>(std::ceil(domain.surface() / delta));
  while (true) {
    const std::vector<BoundarySample> anchors = sample_boundary(domain, count);
    params.anchors = points_of(anchors);
    params.poles.clear();
    for (const Point& y : params.anchors) params.poles.push_back(exterior_tangent_point(domain, y, delta));
    ScalarField field(std::make_shared<BlowupField>(n, k, delta, params.support_radius, params.anchors, params.poles));

    params.probes = sample_boundary(domain, 4 * count);
    std::vector<double> probe_values(params.probes.size());
    parallel_for(probe_values.size(), [&](std::size_t i) { probe_values[i] = field(params.probes[i].point); });
    params.achieved_floor = *std::min_element(probe_values.begin(), probe_values.end());
    if (params.achieved_floor >= k - 1.0) return {field, std::move(params)};

    if (2 * count > options.max_anchors) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "anchor densification failed: boundary minimum %.6g < k-1 = %d with %zu anchors",
                    params.achieved_floor, k - 1, count);
      throw std::runtime_error(buf);
    }
    count *= 2;
  }
}

double blowup_surface_mean(const Blowup& b) {
  double sum = 0.0;
  double weight = 0.0;
  for (const BoundarySample& s : b.params.probes) {
    sum += s.weight * b.field(s.point);
    weight += s.weight;
  }
  return sum / weight;
}

double blowup_volume_mean(const DomainSpec& domain, const Blowup& b) {
  const double depth = b.params.support_radius - b.params.delta;
  const GaussRule& gl = gauss_legendre(4);

  if (const auto* s = std::get_if<Interval>(&domain.variant())) {
    // Piecewise linear between these breakpoints, so the 4-point rule is exact.
    std::vector<double> cuts{s->a, s->b, s->a + depth, s->b - depth, 0.5 * (s->a + s->b)};
    for (double& c : cuts) c = std::clamp(c, s->a, s->b);
    std::sort(cuts.begin(), cuts.end());
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double half = 0.5 * (cuts[i + 1] - cuts[i]);
      if (half <= 0.0) continue;
      const double mid = 0.5 * (cuts[i + 1] + cuts[i]);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        integral += half * gl.weights[q] * b.field(Point{mid + half * gl.nodes[q]});
      }
    }
    return integral / (s->b - s->a);
  }

  // Excess over 1 lives within `depth` of the boundary; integrate it in
  // normal coordinates, dx = (1 - curvature t) ds dt.
  constexpr int kPanels = 8;
  const auto& probes = b.params.probes;
  std::vector<double> excess(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t i) {
    const BoundarySample& s = probes[i];
    const double top = std::min(depth, s.reach);
    if (!(top > 0.0)) return;
    const double half = 0.5 * top / kPanels;
    double sum = 0.0;
    for (int panel = 0; panel < kPanels; ++panel) {
      const double mid = (2 * panel + 1) * half;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double t = mid + half * gl.nodes[q];
        sum += half * gl.weights[q] * (b.field(s.point - t * s.normal) - 1.0) * (1.0 - s.curvature * t);
      }
    }
    excess[i] = s.weight * sum;
  });
  double total = 0.0;
  for (double e : excess) total += e;
  return 1.0 + total / domain.volume();
}

double default_delta(int k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  return 1.0 / (static_cast<double>(k) * k);
}

BlowupTable verify_blowup(const DomainSpec& domain, const std::vector<int>& ks, const DeltaSchedule& schedule,
                          const BlowupOptions& options) {
  if (ks.empty()) throw std::invalid_argument("verify_blowup needs at least one k");
  BlowupTable table;
  const auto* interval = std::get_if<Interval>(&domain.variant());
  double previous = std::numeric_limits<double>::infinity();
  for (int k : ks) {
    BlowupRow row;
    row.k = k;
    row.delta = interval ? interval->b - interval->a : schedule(k);
    if (!interval) {
      const double product = k * row.delta;
      if (product > previous * (1.0 + 1e-12)) table.schedule_bounded = false;
      previous = product;
    }
    const Blowup b = blowup_sequence(domain, k, row.delta, options);
    row.surface_mean = blowup_surface_mean(b);
    row.volume_mean = blowup_volume_mean(domain, b);
    row.anchors = b.params.anchors.size();
    table.rows.push_back(row);
  }
  return table;
}

void write_blowup_csv(std::ostream& out, const BlowupTable& table) {
  out << "k,delta_k,surface_mean,volume_mean,anchors\n";
  char buf[160];
  for (const BlowupRow& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%zu\n", r.k, r.delta, r.surface_mean, r.volume_mean,
                  r.anchors);
    out << buf;
  }
}

double PowerFamily::ball_mean(double r) const { return n * std::pow(r, 2 * p) / (2.0 * p + n); }

double PowerFamily::sphere_mean(double r) const { return std::pow(r, 2 * p); }

double PowerFamily::kappa_min() const { return std::pow(n / (2.0 * p + n), 1.0 / (2.0 * p)); }

PowerFamily power_family(int p, int n) {
  if (p < 1) throw std::invalid_argument("power family needs p >= 1");
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("power family needs n in {1, 2, 3}");
  return PowerFamily{p, n, radial_power(Point::zeros(n), p)};
}

}  // namespace meanfield
