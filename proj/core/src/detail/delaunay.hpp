#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace fbsurf::detail {

// Incremental Bowyer-Watson triangulation of planar points.
// Returns counter-clockwise triangles over the input indices. Cavities are
// grown by adjacency from the containing triangle and shrunk until every
// cavity boundary edge is strictly visible from the new point, so the output
// is a valid triangulation even when the incircle predicate is inexact.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Eigen::Vector2d>& points);

}  // namespace fbsurf::detail
