#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "meanfield/point.hpp"

namespace meanfield {

/// Samples on a uniform tensor grid with node i at lo + i (hi - lo) / (count - 1).
///
/// Text layout: line 1 is `n nx [ny [nz]] xmin xmax [ymin ymax [zmin zmax]]`,
/// followed by the samples in row-major order (x fastest), one row per line.
struct GridSamples {
  int dim = 0;
  std::array<int, kMaxDim> count{1, 1, 1};
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  std::vector<double> values;

  std::size_t size() const { return static_cast<std::size_t>(count[0]) * count[1] * count[2]; }
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (count[axis] - 1); }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(count[0]) * (j + static_cast<std::size_t>(count[1]) * k);
  }
  Point node(std::size_t flat) const;

  /// True if p lies in the bounding box (with a relative slack of 1e-12).
  bool covers(const Point& p) const;

  /// Continuous piecewise-multilinear interpolation. Points outside the box are
  /// clamped onto it.
  double interpolate(const Point& p) const;

  /// Throws std::invalid_argument on an inconsistent header or non-finite value.
  void validate() const;
};

GridSamples read_grid(std::istream& in);
GridSamples read_grid_file(const std::string& path);
void write_grid(std::ostream& out, const GridSamples& grid);

}  // namespace meanfield
