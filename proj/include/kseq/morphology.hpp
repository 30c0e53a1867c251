// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "kseq/grid.hpp"

namespace kseq {

struct Offset {
  int dy = 0;
  int dx = 0;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

/// Set of offsets that always contains the origin.
class StructuringElement {
 public:
  explicit StructuringElement(std::vector<Offset> offsets);

  /// (2r+1)x(2r+1) box; r = 1 is the 8-neighbourhood.
  static StructuringElement box(int radius = 1);
  /// Origin plus its four 4-neighbours.
  static StructuringElement cross();

  std::span<const Offset> offsets() const noexcept { return offsets_; }

 private:
  std::vector<Offset> offsets_;
};

/// out(p) = all(mask(p + o) for o in se); out-of-bounds counts as background.
Mask erode(const Mask& mask, const StructuringElement& se = StructuringElement::box());

/// Number of 8-connected foreground components.
int count_components(const Mask& mask);

/// One-pixel-wide, connectivity-preserving skeleton: two-subiteration
/// thinning whose candidates are the erosion boundary, followed by removal
/// of staircase pixels that are not needed for 8-connectivity.
Mask thin(const Mask& mask);

/// Ordered pixel path along a chromosome. Consecutive points are 8-adjacent
/// and `arclengths` holds cumulative Euclidean distances starting at 0.
struct AxisPolyline {
  std::vector<PixelPos> points;
  std::vector<double> arclengths;

  double length() const { return arclengths.empty() ? 0.0 : arclengths.back(); }
};

/// Builds a polyline from a simple 8-connected path, computing arclengths.
AxisPolyline make_axis(std::vector<PixelPos> points);

AxisPolyline reverse_axis(const AxisPolyline& axis);

struct AxisOptions {
  int prune_len = 5;
  int max_prune_iters = 16;
};

/// Longitudinal axis of a single-component mask: thin, prune side branches
/// until two endpoints remain, trace the path between them, then extend both
/// ends along their local direction to the mask boundary. The start is the
/// endpoint with the smaller (row, col); tokenization may flip it later.
AxisPolyline longitudinal_axis(const Mask& mask, const AxisOptions& options = {});

/// Arclength of the axis point nearest to `point`; ties go to the smaller
/// arclength.
double project_to_axis(Point2 point, const AxisPolyline& axis);

}  // namespace kseq
