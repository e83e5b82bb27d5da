#include "meanfield/torsion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

namespace meanfield {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Shortley-Weller discretisation of -Delta on the interior nodes; Dirichlet
/// walls drop out of the matrix since v = 0 there.
SparseMatrix assemble(const DiscretizedDomain& d) {
  const auto m = static_cast<Eigen::Index>(d.interior_count());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m) * (2 * d.dim() + 1));
  for (Eigen::Index i = 0; i < m; ++i) {
    double diag = 0.0;
    for (int a = 0; a < d.dim(); ++a) {
      const Leg& left = d.leg(static_cast<std::size_t>(i), a, 0);
      const Leg& right = d.leg(static_cast<std::size_t>(i), a, 1);
      const double hl = left.length;
      const double hr = right.length;
      const double cl = 2.0 / (hl * (hl + hr));
      const double cr = 2.0 / (hr * (hl + hr));
      diag += cl + cr;
      if (left.neighbor >= 0) entries.emplace_back(i, left.neighbor, -cl);
      if (right.neighbor >= 0) entries.emplace_back(i, right.neighbor, -cr);
    }
    entries.emplace_back(i, i, diag);
  }
  SparseMatrix A(m, m);
  A.setFromTriplets(entries.begin(), entries.end());
  return A;
}

struct KrylovResult {
  double residual = 0.0;
  int iterations = 0;
};

/// Jacobi-preconditioned BiCGSTAB, restarted from the current iterate while
/// the true relative residual is above tol.
KrylovResult solve_system(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                          int max_iterations) {
  Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
  solver.setTolerance(tol);
  solver.compute(A);
  const double b_norm = b.norm();
  KrylovResult result;
  result.residual = (b - A * x).norm() / b_norm;
  while (result.residual > tol && result.iterations < max_iterations) {
    solver.setMaxIterations(max_iterations - result.iterations);
    x = solver.solveWithGuess(b, x);
    result.iterations += static_cast<int>(solver.iterations());
    const double next = (b - A * x).norm() / b_norm;
    if (solver.iterations() == 0 || !(next < result.residual)) {
      result.residual = next;
      break;
    }
    result.residual = next;
  }
  return result;
}

/// Quadratic Lagrange weights for nodes at 0, 1, 2 evaluated at s.
std::array<double, 3> lagrange3(double s) {
  return {0.5 * (s - 1.0) * (s - 2.0), -s * (s - 2.0), 0.5 * s * (s - 1.0)};
}

/// Interpolates v from a 3 (x 3) block of grid nodes whose values are all
/// known: interior nodes, and nodes lying on the boundary (where v = 0). The
/// block nearest to p is used, extrapolating at most one cell past its edge.
std::optional<double> interpolate_block(const TorsionSolution& sol, const Point& p) {
  const DiscretizedDomain& d = sol.domain;
  const int n = d.dim();
  const double h = d.spacing();
  std::array<double, kMaxDim> t{};
  std::array<int, kMaxDim> first{0, 0, 0};
  std::array<int, kMaxDim> last{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    t[a] = (p[a] - d.origin()[a]) / h;
    first[a] = std::max(0, static_cast<int>(std::ceil(t[a] - 3.0)));
    last[a] = std::min(d.count(a) - 3, static_cast<int>(std::floor(t[a] + 1.0)));
  }

  auto known = [&](const std::array<int, kMaxDim>& ijk) {
    return d.kind(d.flat_index(ijk)) != NodeKind::kExterior;
  };
  auto block_known = [&](int i0, int j0) {
    for (int j = 0; j < (n == 2 ? 3 : 1); ++j) {
      for (int i = 0; i < 3; ++i) {
        if (!known({i0 + i, j0 + j, 0})) return false;
      }
    }
    return true;
  };

  double best_score = std::numeric_limits<double>::infinity();
  std::array<int, 2> best{-1, -1};
  const int j_first = n == 2 ? first[1] : 0;
  const int j_last = n == 2 ? last[1] : 0;
  for (int j0 = j_first; j0 <= j_last; ++j0) {
    for (int i0 = first[0]; i0 <= last[0]; ++i0) {
      const double dx = std::abs(t[0] - (i0 + 1));
      const double dy = n == 2 ? std::abs(t[1] - (j0 + 1)) : 0.0;
      const double score = std::max(dx, dy) + 1e-3 * (dx + dy);
      if (score < best_score && block_known(i0, j0)) {
        best_score = score;
        best = {i0, j0};
      }
    }
  }
  if (best[0] < 0) return std::nullopt;

  const auto wx = lagrange3(t[0] - best[0]);
  const auto wy = n == 2 ? lagrange3(t[1] - best[1]) : std::array<double, 3>{1.0, 0.0, 0.0};
  double value = 0.0;
  for (int j = 0; j < (n == 2 ? 3 : 1); ++j) {
    for (int i = 0; i < 3; ++i) {
      value += wx[i] * wy[j] * sol.node_value(d.flat_index({best[0] + i, best[1] + j, 0}));
    }
  }
  return value;
}

/// First-order estimate v(x) / dist(x, boundary) at the interior node nearest
/// to p.
double first_order_flux(const TorsionSolution& sol, const Point& p) {
  const DiscretizedDomain& d = sol.domain;
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < d.interior_count(); ++i) {
    const double dist = distance(d.interior_point(i), p);
    if (dist < best) {
      best = dist;
      arg = i;
    }
  }
  const double depth = -signed_distance(d.spec(), d.interior_point(arg));
  return sol.v[arg] / depth;
}

}  // namespace

double TorsionSolution::node_value(std::size_t flat) const {
  const int i = domain.interior_index(flat);
  return i >= 0 ? v[static_cast<std::size_t>(i)] : 0.0;
}

TorsionSolution solve_torsion(const DiscretizedDomain& domain, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (options.max_iterations < 0) throw std::invalid_argument("max iterations must be non-negative");
  const std::size_t m = domain.interior_count();
  const int max_iterations = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(20 * m + 1000);

  const SparseMatrix A = assemble(domain);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  const KrylovResult kr = solve_system(A, b, x, options.tol, max_iterations);
  TorsionSolution sol{domain, std::vector<double>(x.data(), x.data() + x.size()), 0.0, 0, {}};
  sol.residual = kr.residual;
  sol.iterations = kr.iterations;
  if (!(kr.residual <= options.tol)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "torsion solver did not converge: residual %.3e after %d iterations",
                  kr.residual, kr.iterations);
    throw std::runtime_error(buf);
  }
  sol.flux = normal_derivative(sol);
  return sol;
}

std::vector<FluxSample> normal_derivative(const TorsionSolution& sol) {
  const double d = sol.domain.spacing();
  std::vector<FluxSample> out;
  out.reserve(sol.domain.boundary().size());
  for (const BoundaryNode& node : sol.domain.boundary()) {
    FluxSample f{node.point, node.normal, 0.0, node.weight, false};
    const auto v1 = interpolate_block(sol, node.point - d * node.normal);
    const auto v2 = interpolate_block(sol, node.point - 2.0 * d * node.normal);
    if (v1 && v2) {
      f.q = (4.0 * *v1 - *v2) / (2.0 * d);
    } else {
      f.q = first_order_flux(sol, node.point);
      f.first_order = true;
    }
    out.push_back(f);
  }
  return out;
}

HarnackConstants harnack_constants(const TorsionSolution& sol) {
  if (sol.flux.empty()) throw std::invalid_argument("torsion solution has no flux samples");
  const double volume = sol.domain.volume();
  const double surface = sol.domain.surface();
  const double scale = surface / volume;
  HarnackConstants c;
  c.c1 = std::numeric_limits<double>::infinity();
  c.c2 = -std::numeric_limits<double>::infinity();
  double flux = 0.0;
  for (const FluxSample& f : sol.flux) {
    flux += f.q * f.weight;
    const double k = f.q * scale;
    if (k < c.c1) {
      c.c1 = k;
      c.argmin = f.point;
    }
    if (k > c.c2) {
      c.c2 = k;
      c.argmax = f.point;
    }
    if (f.first_order) ++c.first_order_points;
  }
  c.kernel_mean = flux / volume;
  if (std::abs(c.kernel_mean - 1.0) > 0.02) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "flux identity violated: sum(q w) / |Omega| = %.6f", c.kernel_mean);
    throw std::runtime_error(buf);
  }
  return c;
}

double serrin_deficit(const TorsionSolution& sol) {
  if (sol.flux.empty()) throw std::invalid_argument("torsion solution has no flux samples");
  const double surface = sol.domain.surface();
  double q2 = 0.0;
  for (const FluxSample& f : sol.flux) q2 += f.q * f.q * f.weight;
  const double ratio = sol.domain.volume() / surface;
  return q2 / surface - ratio * ratio;
}

HarnackCheck harnack_verify(const TorsionSolution& sol, const HarnackConstants& constants, const ScalarField& h) {
  if (h.dim() != sol.domain.dim()) throw std::invalid_argument("dimension mismatch between field and domain");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double largest = 0.0;
  auto track = [&](double value) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    largest = std::max(largest, std::abs(value));
  };

  double surface_sum = 0.0;
  double surface_weight = 0.0;
  for (const BoundaryNode& b : sol.domain.boundary()) {
    const double value = h(b.point);
    if (value < 0.0) {
      throw std::domain_error("field is negative on the boundary at " + b.point.str());
    }
    track(value);
    surface_sum += b.weight * value;
    surface_weight += b.weight;
  }
  double volume_sum = 0.0;
  double volume_weight = 0.0;
  for (const VolumeSample& s : sol.domain.volume_samples()) {
    const double value = h(s.point);
    track(value);
    volume_sum += s.weight * value;
    volume_weight += s.weight;
  }

  HarnackCheck check;
  check.surface_mean = surface_sum / surface_weight;
  check.volume_mean = volume_sum / volume_weight;
  check.lower = constants.c1 * check.surface_mean;
  check.upper = constants.c2 * check.surface_mean;
  const double range = hi - lo;
  check.slack = 0.02 * (range > 1e-12 * largest ? range : largest);
  check.holds = check.lower - check.slack <= check.volume_mean && check.volume_mean <= check.upper + check.slack;
  return check;
}

void write_solution_grid(std::ostream& out, const TorsionSolution& sol) {
  const DiscretizedDomain& d = sol.domain;
  GridSamples g;
  g.dim = d.dim();
  for (int a = 0; a < g.dim; ++a) {
    g.count[a] = d.count(a);
    g.lo[a] = d.origin()[a];
    g.hi[a] = d.origin()[a] + (d.count(a) - 1) * d.spacing();
  }
  g.values.resize(d.node_count());
  for (std::size_t f = 0; f < d.node_count(); ++f) g.values[f] = sol.node_value(f);
  write_grid(out, g);
}

void write_flux_csv(std::ostream& out, const TorsionSolution& sol) {
  out << "x,y,nx,ny,q,weight\n";
  const bool planar = sol.domain.dim() == 2;
  char buf[192];
  for (const FluxSample& f : sol.flux) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.point[0], planar ? f.point[1] : 0.0,
                  f.normal[0], planar ? f.normal[1] : 0.0, f.q, f.weight);
    out << buf;
  }
}

}  // namespace meanfield
