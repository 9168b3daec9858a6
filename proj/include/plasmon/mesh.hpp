#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace plasmon {

/// Uniform partition of [lo, hi] into n cells.
struct RectGrid1D {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 0;
    std::vector<double> edges;    // n + 1 entries, edges[0] = lo, edges[n] = hi
    std::vector<double> centers;  // n entries
    std::vector<double> widths;   // edges[i+1] - edges[i]

    std::size_t size() const { return n; }
    double length() const { return hi - lo; }

    /// Index of the cell containing x; points outside are clamped to the end cells.
    std::size_t locate(double x) const;
};

RectGrid1D build_rect_grid(double lo, double hi, std::size_t n);

/// A point of the (k_r, r) plane.
struct Point2 {
    double kr = 0.0;
    double r = 0.0;
};

/// Structured triangulation of the rectangle kr_grid x r_grid. Each rectangle
/// is split along its lower-left to upper-right diagonal into a lower-right
/// triangle (local id 0) and an upper-left triangle (local id 1), both
/// counter-clockwise.
struct TriMesh {
    RectGrid1D kr_grid;
    RectGrid1D r_grid;
    std::vector<Point2> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;
    std::vector<double> areas;
    /// Triangles sharing at least one vertex, sorted ascending, self excluded.
    std::vector<std::vector<std::size_t>> neighbors;

    std::size_t num_triangles() const { return triangles.size(); }
    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t vertex_index(std::size_t i_kr, std::size_t j_r) const {
        return j_r * (kr_grid.n + 1) + i_kr;
    }

    /// Triangle whose closure contains p (points outside are clamped).
    std::size_t locate(Point2 p) const;
    bool contains(Point2 p) const;

    /// Barycentric coordinates of p with respect to triangle t.
    std::array<double, 3> barycentric(std::size_t t, Point2 p) const;

    Point2 centroid(std::size_t t) const;
    std::array<Point2, 3> corners(std::size_t t) const;

    double total_area() const;
};

TriMesh build_tri_mesh(const RectGrid1D& kr_grid, const RectGrid1D& r_grid);

}  // namespace plasmon
