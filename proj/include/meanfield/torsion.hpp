#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "meanfield/fields.hpp"
#include "meanfield/geometry.hpp"

namespace meanfield {

/// Boundary flux sample q = -dv/dnu.
struct FluxSample {
  Point point;
  Point normal;
  double q = 0.0;
  double weight = 0.0;
  bool first_order = false;  // fell back to the one-point estimate
};

struct TorsionSolution {
  DiscretizedDomain domain;
  std::vector<double> v;  // one value per interior node
  double residual = 0.0;  // relative, ||b - Av|| / ||b||
  int iterations = 0;
  std::vector<FluxSample> flux;

  /// Value at a grid node: v at interior nodes, 0 elsewhere.
  double node_value(std::size_t flat) const;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iterations = 0;  // 0: 20 * (number of unknowns) + 1000
};

/// Delta v + 1 = 0 in Omega, v = 0 on the boundary, by the Shortley-Weller
/// stencil and Jacobi-preconditioned BiCGSTAB. Fills in the boundary flux.
TorsionSolution solve_torsion(const DiscretizedDomain& domain, const SolverOptions& options = {});

/// q at every boundary node: (4 v(d) - v(2d)) / (2d) with d = h along the
/// inward normal, v interpolated biquadratically from nearby grid values.
std::vector<FluxSample> normal_derivative(const TorsionSolution& sol);

struct HarnackConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  Point argmin;
  Point argmax;
  double kernel_mean = 0.0;  // sum(q w) / |Omega|, ideally 1
  std::size_t first_order_points = 0;
};

/// c1 = min q |dOmega| / |Omega|, c2 = max of the same. Throws when the flux
/// identity sum(q w) = |Omega| is off by more than 2%.
HarnackConstants harnack_constants(const TorsionSolution& sol);

/// (1 / |dOmega|) * sum(q^2 w) - (|Omega| / |dOmega|)^2.
double serrin_deficit(const TorsionSolution& sol);

struct HarnackCheck {
  double volume_mean = 0.0;
  double surface_mean = 0.0;
  double lower = 0.0;  // c1 * surface_mean
  double upper = 0.0;  // c2 * surface_mean
  double slack = 0.0;  // 2% of the field's range over the samples
  bool holds = false;
};

/// Checks c1 S <= B <= c2 S (up to the slack) for a non-negative harmonic field.
HarnackCheck harnack_verify(const TorsionSolution& sol, const HarnackConstants& constants, const ScalarField& h);

/// Grid file of v over the whole lattice (0 off the interior).
void write_solution_grid(std::ostream& out, const TorsionSolution& sol);

/// CSV `x,y,nx,ny,q,weight`.
void write_flux_csv(std::ostream& out, const TorsionSolution& sol);

}  // namespace meanfield
