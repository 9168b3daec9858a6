#include "plasmon/geometry.hpp"

#include <cmath>

namespace plasmon {

Polygon clip_polygon(const Polygon& poly, const std::function<double(Point2)>& level) {
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = level(poly[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (i + 1) % n;
        const Point2 a = poly[i];
        const Point2 b = poly[k];
        const double fa = values[i];
        const double fb = values[k];
        if (fa >= 0.0) out.push_back(a);
        if ((fa >= 0.0) != (fb >= 0.0)) {
            const double s = fa / (fa - fb);
            out.push_back({a.kr + s * (b.kr - a.kr), a.r + s * (b.r - a.r)});
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

Polygon clip_to_r_slab(const Polygon& poly, double lo, double hi) {
    Polygon lower = clip_polygon(poly, [lo](Point2 p) { return p.r - lo; });
    return clip_polygon(lower, [hi](Point2 p) { return hi - p.r; });
}

double polygon_area(const Polygon& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % n];
        twice += a.kr * b.r - b.kr * a.r;
    }
    return 0.5 * std::abs(twice);
}

Point2 polygon_centroid(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n == 0) return {};
    // Fan triangulation from the first vertex.
    double area = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point2 a = poly[0];
        const Point2 b = poly[i];
        const Point2 c = poly[i + 1];
        const double w = 0.5 * std::abs((b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r));
        area += w;
        cx += w * (a.kr + b.kr + c.kr) / 3.0;
        cy += w * (a.r + b.r + c.r) / 3.0;
    }
    if (area <= 0.0) {
        Point2 mean{};
        for (const auto& p : poly) {
            mean.kr += p.kr / static_cast<double>(n);
            mean.r += p.r / static_cast<double>(n);
        }
        return mean;
    }
    return {cx / area, cy / area};
}

}  // namespace plasmon
