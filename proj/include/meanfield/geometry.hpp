#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "meanfield/grid.hpp"
#include "meanfield/point.hpp"

namespace meanfield {

struct Interval {
  double a = 0.0;
  double b = 1.0;
};

/// Axis-aligned rectangle (n = 2) or box (n = 3).
struct Rectangle {
  Point lo;
  Point hi;
};

/// Disk (n = 2) or solid ball (n = 3).
struct Disk {
  Point center;
  double radius = 1.0;
};

struct Annulus {
  Point center;
  double r_in = 0.5;
  double r_out = 1.0;
};

/// Domain given by signed-distance samples; negative inside.
struct SdfGrid {
  std::shared_ptr<const GridSamples> samples;
};

class DomainSpec {
 public:
  using Variant = std::variant<Interval, Rectangle, Disk, Annulus, SdfGrid>;

  static DomainSpec interval(double a, double b);
  static DomainSpec rectangle(const Point& lo, const Point& hi);
  static DomainSpec disk(const Point& center, double radius);
  static DomainSpec annulus(const Point& center, double r_in, double r_out);
  static DomainSpec sdf_grid(GridSamples samples);

  int dim() const { return dim_; }
  const Variant& variant() const { return shape_; }
  std::string name() const;
  bool analytic() const { return !std::holds_alternative<SdfGrid>(shape_); }

  /// Axis-aligned bounding box of the closure.
  std::pair<Point, Point> bounding_box() const;

  /// Exact |Omega| and |dOmega| for analytic variants; throws for sdf_grid.
  double volume() const;
  double surface() const;

 private:
  DomainSpec(Variant v, int dim) : shape_(std::move(v)), dim_(dim) {}

  Variant shape_;
  int dim_ = 0;
};

/// Negative inside, zero on the boundary, positive outside.
double signed_distance(const DomainSpec& spec, const Point& p);

/// Unit outward normal: the signed-distance gradient, or the outward bisector
/// at rectangle corners.
Point outward_normal(const DomainSpec& spec, const Point& p);

/// True when the closed ball lies in the open domain, i.e.
/// signed_distance(center) + radius < -1e-12.
bool contains_closed_ball(const DomainSpec& spec, const BallSpec& ball);

/// Center of the exterior ball of radius delta that touches the closure of the
/// domain only at the boundary point y.
Point exterior_tangent_point(const DomainSpec& spec, const Point& y, double delta);

enum class NodeKind : std::uint8_t { kExterior, kBoundary, kInterior };

struct BoundaryNode {
  Point point;
  Point normal;  // outward, unit length
  double weight = 0.0;
};

struct VolumeSample {
  Point point;
  double weight = 0.0;
};

/// One arm of the finite-difference stencil: either an interior neighbour, or
/// a Dirichlet wall at distance `length` (neighbor == -1).
struct Leg {
  int neighbor = -1;
  double length = 0.0;
};

/// Cartesian grid realisation of a domain with cut-point boundary nodes.
class DiscretizedDomain {
 public:
  const DomainSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  double spacing() const { return h_; }
  const Point& origin() const { return origin_; }
  int count(int axis) const { return count_[axis]; }
  std::size_t node_count() const { return kind_.size(); }

  std::size_t flat_index(const std::array<int, kMaxDim>& ijk) const {
    return static_cast<std::size_t>(ijk[0]) +
           static_cast<std::size_t>(count_[0]) * (ijk[1] + static_cast<std::size_t>(count_[1]) * ijk[2]);
  }
  std::array<int, kMaxDim> grid_index(std::size_t flat) const;
  Point node_point(std::size_t flat) const;
  NodeKind kind(std::size_t flat) const { return kind_[flat]; }

  std::size_t interior_count() const { return interior_.size(); }
  std::size_t interior_node(std::size_t i) const { return interior_[i]; }
  Point interior_point(std::size_t i) const { return node_point(interior_[i]); }
  /// Interior ordinal of a grid node, or -1.
  int interior_index(std::size_t flat) const { return interior_of_node_[flat]; }
  /// Stencil arm of interior node i along `axis`, dir 0 = negative, 1 = positive.
  const Leg& leg(std::size_t i, int axis, int dir) const { return legs_[(i * dim_ + axis) * 2 + dir]; }

  const std::vector<BoundaryNode>& boundary() const { return boundary_; }
  /// Quadrature for integrals over the domain; weights sum to volume().
  const std::vector<VolumeSample>& volume_samples() const { return volume_samples_; }
  double volume() const { return volume_; }
  double surface() const { return surface_; }

 private:
  friend DiscretizedDomain discretize(const DomainSpec& spec, double h);
  explicit DiscretizedDomain(DomainSpec spec) : spec_(std::move(spec)) {}

  DomainSpec spec_;
  int dim_ = 0;
  double h_ = 0.0;
  Point origin_;
  std::array<int, kMaxDim> count_{1, 1, 1};
  std::vector<NodeKind> kind_;
  std::vector<int> interior_of_node_;
  std::vector<std::size_t> interior_;
  std::vector<Leg> legs_;
  std::vector<BoundaryNode> boundary_;
  std::vector<VolumeSample> volume_samples_;
  double volume_ = 0.0;
  double surface_ = 0.0;
};

/// Uniform grid of spacing h (n = 1, 2). Grid nodes with signed distance
/// below -1e-8 h are interior; boundary nodes are grid-line crossings of the
/// boundary plus grid nodes lying on it. Surface weights come from the
/// piecewise-linear boundary reconstruction in each cell, volumes from the
/// clipped cell polygons.
DiscretizedDomain discretize(const DomainSpec& spec, double h);

/// Boundary point with arc-length weight, curvature (positive for convex
/// parts) and reach: distance along the inward normal to the medial axis.
struct BoundarySample {
  Point point;
  Point normal;
  double weight = 0.0;
  double curvature = 0.0;
  double reach = 0.0;
};

/// `count` boundary points equispaced in arc length (per component) for
/// intervals and the analytic 2-D variants.
std::vector<BoundarySample> sample_boundary(const DomainSpec& spec, std::size_t count);

}  // namespace meanfield
