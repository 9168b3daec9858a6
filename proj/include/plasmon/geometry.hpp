#pragma once

#include <functional>
#include <vector>

#include "plasmon/mesh.hpp"

namespace plasmon {

using Polygon = std::vector<Point2>;

/// Keeps the part of a convex polygon where the affine function `level` is
/// non-negative (Sutherland-Hodgman against one half-plane). Crossing points
/// are placed by linear interpolation of `level`, which is exact for affine
/// functions.
Polygon clip_polygon(const Polygon& poly, const std::function<double(Point2)>& level);

/// Part of the convex polygon inside the slab lo <= r <= hi.
Polygon clip_to_r_slab(const Polygon& poly, double lo, double hi);

double polygon_area(const Polygon& poly);
Point2 polygon_centroid(const Polygon& poly);

}  // namespace plasmon
