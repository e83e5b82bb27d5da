#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "meanfield/fields.hpp"
#include "meanfield/geometry.hpp"

namespace meanfield {

/// v_k(x) = max{1, k - k^2 x, k + k^2 (x - 1)} on (0, 1).
ScalarField blowup_1d(int k);

/// Closed forms for blowup_1d: the endpoint mean is k, the volume mean is
/// 1 - 2(k-1)/k^2 + 2(k-1)/k - (k-1)^2/k^2.
double blowup_1d_surface_mean(int k);
double blowup_1d_volume_mean(int k);

/// Radius ratio rho >= 1 at which Psi(rho) - Psi(1) reaches `gain` (n = 1, 2).
double psi_gain_radius(int n, double gain);

/// Smallest k > 2 with -k^2 (Psi(2) - Psi(1)) + k < 1, beyond which the
/// blow-up field equals 1 at distance >= delta from the boundary.
int blowup_interior_threshold(int n);

struct BlowupParams {
  int k = 0;
  double delta = 0.0;
  std::vector<Point> anchors;     // boundary points y_j
  std::vector<Point> poles;       // exterior tangent points, |y_j - pole_j| = delta
  double patch_radius = 0.0;      // v_{y_j} >= k - 1 on B(y_j, patch_radius)
  double support_radius = 0.0;    // v_{y_j} > 1 only within this distance of pole_j
  double achieved_floor = 0.0;    // min over probes of max_j v_{y_j}
  std::vector<BoundarySample> probes;
};

struct Blowup {
  ScalarField field;
  BlowupParams params;
};

struct BlowupOptions {
  std::size_t max_anchors = std::size_t{1} << 21;
};

/// v^k = max{max_j v_{y_j}^k, 1} with
/// v_y^k(x) = -k^2 Psi(|x - pole|/delta) + k^2 Psi(|y - pole|/delta) + k.
/// Anchors start at ceil(|dOmega| / delta) equispaced points and double until
/// the boundary probe set (4x denser) sees max_j v_{y_j} >= k - 1 everywhere.
Blowup blowup_sequence(const DomainSpec& domain, int k, double delta, const BlowupOptions& options = {});

struct BlowupRow {
  int k = 0;
  double delta = 0.0;
  double surface_mean = 0.0;
  double volume_mean = 0.0;
  std::size_t anchors = 0;
};

struct BlowupTable {
  std::vector<BlowupRow> rows;
  /// False when k * delta_k increases along the table (the volume bound
  /// needs it bounded); the rows are still computed.
  bool schedule_bounded = true;
};

using DeltaSchedule = std::function<double(int k)>;

/// delta_k = k^{-2}.
double default_delta(int k);

/// Surface means over the probe set and volume means (normalised by |Omega|).
/// For intervals the rows use delta = |Omega|, which turns the sequence into the
/// rescaled blowup_1d tent; the schedule is ignored there.
BlowupTable verify_blowup(const DomainSpec& domain, const std::vector<int>& ks,
                          const DeltaSchedule& schedule = default_delta, const BlowupOptions& options = {});

/// (1/|Omega|) * integral of the blow-up field, by normal-coordinate
/// quadrature over the boundary layer where it exceeds 1.
double blowup_volume_mean(const DomainSpec& domain, const Blowup& b);

/// Weighted mean of the blow-up field over its probe set.
double blowup_surface_mean(const Blowup& b);

/// CSV `k,delta_k,surface_mean,volume_mean,anchors`.
void write_blowup_csv(std::ostream& out, const BlowupTable& table);

struct PowerFamily {
  int p = 1;
  int n = 2;
  ScalarField field;  // |x|^{2p}

  /// n r^{2p} / (2p + n).
  double ball_mean(double r) const;
  /// r^{2p}.
  double sphere_mean(double r) const;
  /// (n / (2p + n))^{1/(2p)}: S_0(kappa r) <= B_0(r) iff kappa <= kappa_min.
  double kappa_min() const;
};

PowerFamily power_family(int p, int n);

}  // namespace meanfield
