#include <doctest.h>

#include <cmath>
#include <limits>

#include "plasmon/errors.hpp"
#include "plasmon/geometry.hpp"
#include "plasmon/mesh.hpp"
#include "support.hpp"

using namespace plasmon;
using plasmon::testing::Gen;

TEST_CASE("rect grid bisects the unit interval") {
    const auto g = build_rect_grid(0.0, 1.0, 2);
    CHECK(g.edges == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(g.centers == std::vector<double>{0.25, 0.75});
}

TEST_CASE("rect grid over the parallel momentum range") {
    const auto g = build_rect_grid(10.0, 25.0, 75);
    CHECK(g.size() == 75);
    CHECK(g.edges.front() == 10.0);
    CHECK(g.edges.back() == 25.0);
    for (double w : g.widths) CHECK(w == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("single-cell grid") {
    const auto g = build_rect_grid(0.0, 1.0, 1);
    CHECK(g.centers == std::vector<double>{0.5});
}

TEST_CASE("rect grid rejects bad arguments") {
    CHECK_THROWS_AS(build_rect_grid(0.0, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(build_rect_grid(1.0, 0.0, 3), ConfigError);
    CHECK_THROWS_AS(build_rect_grid(0.0, std::numeric_limits<double>::infinity(), 3), ConfigError);
    CHECK_THROWS_AS(build_rect_grid(std::nan(""), 1.0, 3), ConfigError);
}

TEST_CASE("one rectangle splits into two neighbouring triangles") {
    const auto m = build_tri_mesh(build_rect_grid(0.0, 1.0, 1), build_rect_grid(0.0, 1.0, 1));
    REQUIRE(m.num_triangles() == 2);
    CHECK(m.neighbors[0] == std::vector<std::size_t>{1});
    CHECK(m.neighbors[1] == std::vector<std::size_t>{0});
    CHECK(m.areas[0] == doctest::Approx(0.5));
}

TEST_CASE("20x20 mesh has 800 triangles") {
    const auto m = build_tri_mesh(build_rect_grid(-1.0, 1.0, 20), build_rect_grid(0.0, 1.0, 20));
    CHECK(m.num_triangles() == 800);
}

TEST_CASE("3x5 mesh tiles its rectangle") {
    const auto m = build_tri_mesh(build_rect_grid(-1.0, 1.0, 3), build_rect_grid(0.0, 1.0, 5));
    CHECK(m.total_area() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mesh invariants on random grid sizes") {
    Gen gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nx = gen.index(1, 50), ny = gen.index(1, 50);
        const double x0 = gen.uniform(-3, 0), x1 = x0 + gen.uniform(0.1, 4);
        const double y0 = gen.uniform(0, 1), y1 = y0 + gen.uniform(0.1, 4);
        const auto m = build_tri_mesh(build_rect_grid(x0, x1, nx), build_rect_grid(y0, y1, ny));
        const double rect = (x1 - x0) * (y1 - y0);
        CHECK(std::abs(m.total_area() - rect) <= 1e-12 * rect);
        for (std::size_t t = 0; t < m.num_triangles(); ++t) {
            const auto [a, b, c] = m.corners(t);
            CHECK((b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r) > 0.0);
            for (std::size_t s : m.neighbors[t]) {
                const auto& nb = m.neighbors[s];
                CHECK(std::binary_search(nb.begin(), nb.end(), t));
                int shared = 0;
                for (auto v : m.triangles[t])
                    for (auto w : m.triangles[s]) shared += v == w;
                CHECK(shared >= 1);
            }
        }
        const auto again = build_tri_mesh(build_rect_grid(x0, x1, nx), build_rect_grid(y0, y1, ny));
        CHECK(again.areas == m.areas);
        CHECK(again.triangles == m.triangles);
    }
}

TEST_CASE("locate returns a triangle containing the point") {
    Gen gen(5);
    const auto m = build_tri_mesh(build_rect_grid(-1.0, 1.0, 7), build_rect_grid(0.0, 1.0, 4));
    for (int k = 0; k < 500; ++k) {
        const Point2 p{gen.uniform(-1, 1), gen.uniform(0, 1)};
        const auto lam = m.barycentric(m.locate(p), p);
        for (double l : lam) CHECK(l >= -1e-12);
    }
}

TEST_CASE("polygon clipping keeps the exact half-plane part") {
    const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polygon half = clip_polygon(square, [](Point2 p) { return 0.25 - p.kr; });
    CHECK(polygon_area(half) == doctest::Approx(0.25).epsilon(1e-15));
    const Polygon slab = clip_to_r_slab({{0, 0}, {1, 0}, {0, 1}}, 0.5, 2.0);
    CHECK(polygon_area(slab) == doctest::Approx(0.125).epsilon(1e-15));
    const Point2 c = polygon_centroid({{0, 0}, {1, 0}, {0, 1}});
    CHECK(c.kr == doctest::Approx(1.0 / 3.0));
    CHECK(c.r == doctest::Approx(1.0 / 3.0));
}
