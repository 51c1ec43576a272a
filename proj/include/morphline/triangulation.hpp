#pragma once

#include <array>
#include <span>
#include <vector>

#include "morphline/geometry.hpp"

namespace morphline {

using Triangle = std::array<int, 3>;

struct TriangleMesh {
    std::vector<Point2d> vertices;
    /// Counter-clockwise in image coordinates (y down), smallest index first, sorted.
    std::vector<Triangle> triangles;

    friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

inline constexpr int kBoundaryAnchorCount = 8;

/// Image-rectangle corners and edge midpoints: (0,0), (w,0), (w,h), (0,h), then the
/// midpoints of the top, right, bottom and left edges.
std::array<Point2d, kBoundaryAnchorCount> boundary_anchors(int width, int height);

/// Delaunay triangulation of the given points, indices referring to the input order.
/// Exactly repeated points are triangulated once (first occurrence). Cocircular ties
/// resolve to the diagonal that contains the lowest vertex index.
/// Throws DegenerateConfiguration for fewer than 3 distinct or all-collinear points.
std::vector<Triangle> delaunay(std::span<const Point2d> points);

/// Delaunay mesh of points plus the 8 boundary anchors (appended after the input points),
/// covering the full [0, width] x [0, height] rectangle.
TriangleMesh triangulate(std::span<const Point2d> points, int width, int height);

/// Same topology with a different set of (non-anchor) vertex positions; anchors are
/// regenerated for the given image size.
TriangleMesh with_vertices(const TriangleMesh& topology, std::span<const Point2d> points, int width,
                           int height);

/// Signed area, positive for counter-clockwise (in a y-down frame, visually clockwise).
double signed_area(const Point2d& a, const Point2d& b, const Point2d& c) noexcept;

}  // namespace morphline
