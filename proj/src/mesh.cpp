#include "plasmon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plasmon/errors.hpp"
#include "plasmon/numerics.hpp"

namespace plasmon {

RectGrid1D build_rect_grid(double lo, double hi, std::size_t n) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw ConfigError("grid bounds must be finite");
    if (!(lo < hi))
        throw ConfigError("grid bounds must satisfy lo < hi (got " + std::to_string(lo) +
                          ", " + std::to_string(hi) + ")");
    if (n == 0) throw ConfigError("grid cell count must be at least 1");

    RectGrid1D g;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    g.edges.resize(n + 1);
    const double span = hi - lo;
    for (std::size_t i = 0; i <= n; ++i)
        g.edges[i] = lo + span * static_cast<double>(i) / static_cast<double>(n);
    g.edges[n] = hi;
    g.centers.resize(n);
    g.widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.centers[i] = 0.5 * (g.edges[i] + g.edges[i + 1]);
        g.widths[i] = g.edges[i + 1] - g.edges[i];
    }
    return g;
}

std::size_t RectGrid1D::locate(double x) const {
    if (x <= edges.front()) return 0;
    if (x >= edges.back()) return n - 1;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t i = static_cast<std::size_t>(it - edges.begin()) - 1;
    return std::min(i, n - 1);
}

TriMesh build_tri_mesh(const RectGrid1D& kr_grid, const RectGrid1D& r_grid) {
    TriMesh m;
    m.kr_grid = kr_grid;
    m.r_grid = r_grid;
    const std::size_t nx = kr_grid.n;
    const std::size_t ny = r_grid.n;

    m.vertices.reserve((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j)
        for (std::size_t i = 0; i <= nx; ++i)
            m.vertices.push_back({kr_grid.edges[i], r_grid.edges[j]});

    m.triangles.reserve(2 * nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t v00 = m.vertex_index(i, j);
            const std::size_t v10 = m.vertex_index(i + 1, j);
            const std::size_t v01 = m.vertex_index(i, j + 1);
            const std::size_t v11 = m.vertex_index(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }

    m.areas.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto [a, b, c] = m.corners(t);
        const double cross = (b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r);
        m.areas[t] = 0.5 * std::abs(cross);
    }

    std::vector<std::vector<std::size_t>> by_vertex(m.vertices.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        for (std::size_t v : m.triangles[t]) by_vertex[v].push_back(t);

    m.neighbors.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        auto& nb = m.neighbors[t];
        for (std::size_t v : m.triangles[t])
            for (std::size_t s : by_vertex[v])
                if (s != t) nb.push_back(s);
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return m;
}

std::array<Point2, 3> TriMesh::corners(std::size_t t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
}

Point2 TriMesh::centroid(std::size_t t) const {
    const auto [a, b, c] = corners(t);
    return {(a.kr + b.kr + c.kr) / 3.0, (a.r + b.r + c.r) / 3.0};
}

bool TriMesh::contains(Point2 p) const {
    return p.kr >= kr_grid.lo && p.kr <= kr_grid.hi && p.r >= r_grid.lo && p.r <= r_grid.hi;
}

std::size_t TriMesh::locate(Point2 p) const {
    const std::size_t i = kr_grid.locate(p.kr);
    const std::size_t j = r_grid.locate(p.r);
    const double u = std::clamp((p.kr - kr_grid.edges[i]) / kr_grid.widths[i], 0.0, 1.0);
    const double v = std::clamp((p.r - r_grid.edges[j]) / r_grid.widths[j], 0.0, 1.0);
    const std::size_t base = 2 * (j * kr_grid.n + i);
    return v <= u ? base : base + 1;
}

std::array<double, 3> TriMesh::barycentric(std::size_t t, Point2 p) const {
    const auto [a, b, c] = corners(t);
    const double det = (b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r);
    const double l1 = ((p.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (p.r - a.r)) / det;
    const double l2 = ((b.kr - a.kr) * (p.r - a.r) - (p.kr - a.kr) * (b.r - a.r)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

double TriMesh::total_area() const { return pairwise_sum(areas); }

}  // namespace plasmon
