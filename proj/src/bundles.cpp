#include "plasmon/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "plasmon/errors.hpp"
#include "plasmon/geometry.hpp"
#include "plasmon/numerics.hpp"
#include "plasmon/parallel.hpp"

namespace plasmon {

namespace {

bool shares(const std::array<std::size_t, 3>& tri, std::size_t v) {
    return tri[0] == v || tri[1] == v || tri[2] == v;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // The smaller root wins so labels do not depend on the order of unions.
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ConnectionMatrix connection_matrix(const TriMesh& mesh, const PLHamiltonian& H, Interval I) {
    const std::size_t n = mesh.num_triangles();
    ConnectionMatrix A;
    A.active.assign(n, 0);
    A.links.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto h = H.triangle_values(mesh, t);
        const double lo = std::min({h[0], h[1], h[2]});
        const double hi = std::max({h[0], h[1], h[2]});
        A.active[t] = I.intersects_closed(lo, hi) ? 1 : 0;
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (!A.active[t]) continue;
        const auto& tri = mesh.triangles[t];
        for (std::size_t s : mesh.neighbors[t]) {
            if (!A.active[s]) continue;
            const auto& other = mesh.triangles[s];
            double lo = INFINITY;
            double hi = -INFINITY;
            for (std::size_t v : tri) {
                if (!shares(other, v)) continue;
                lo = std::min(lo, H.node_values[v]);
                hi = std::max(hi, H.node_values[v]);
            }
            if (I.intersects_closed(lo, hi)) A.links[t].push_back(s);
        }
    }
    return A;
}

std::vector<std::vector<std::size_t>> connected_components(const ConnectionMatrix& A) {
    const std::size_t n = A.active.size();
    UnionFind uf(n);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s : A.links[t]) uf.unite(t, s);

    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> slot(n, SIZE_MAX);
    for (std::size_t t = 0; t < n; ++t) {
        if (!A.active[t]) continue;
        const std::size_t root = uf.find(t);
        if (slot[root] == SIZE_MAX) {
            slot[root] = comps.size();
            comps.emplace_back();
        }
        comps[slot[root]].push_back(t);
    }
    return comps;
}

double fraction_above(std::array<double, 3> values, double level) {
    std::sort(values.begin(), values.end());
    const double h1 = values[0], h2 = values[1], h3 = values[2];
    if (level <= h1) return 1.0;
    if (level >= h3) return 0.0;
    double f;
    if (level >= h2) {
        f = ((h3 - level) / (h3 - h1)) * ((h3 - level) / (h3 - h2));
    } else {
        f = 1.0 - ((level - h1) / (h2 - h1)) * ((level - h1) / (h3 - h1));
    }
    return std::clamp(f, 0.0, 1.0);
}

double triangle_proportion(std::array<double, 3> values, Interval I) {
    return std::clamp(fraction_above(values, I.a) - fraction_above(values, I.b), 0.0, 1.0);
}

std::vector<double> proportions(const TriMesh& mesh, const PLHamiltonian& H, Interval I,
                                const std::vector<std::size_t>& cover) {
    std::vector<double> out(cover.size());
    for (std::size_t m = 0; m < cover.size(); ++m)
        out[m] = triangle_proportion(H.triangle_values(mesh, cover[m]), I);
    return out;
}

namespace {

bool touches_boundary(const TriMesh& mesh, const PLHamiltonian& H, std::size_t t, Interval I) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t v : mesh.triangles[t]) {
        const double kr = mesh.vertices[v].kr;
        if (kr != mesh.kr_grid.lo && kr != mesh.kr_grid.hi) continue;
        lo = std::min(lo, H.node_values[v]);
        hi = std::max(hi, H.node_values[v]);
    }
    return lo <= hi && I.intersects_closed(lo, hi);
}

}  // namespace

BundleFamily build_bundles(const TriMesh& mesh, const PLHamiltonian& H, const Stratification& strat,
                           std::size_t phz_cell, double phz_cell_area) {
    BundleFamily family;
    for (std::size_t j = 0; j < strat.num_intervals(); ++j) {
        const Interval I{strat.levels[j], strat.levels[j + 1]};
        const auto A = connection_matrix(mesh, H, I);
        for (auto& cover : connected_components(A)) {
            TrajectoryBundle b;
            b.phz_cell = phz_cell;
            b.interval = j;
            b.h_a = I.a;
            b.h_b = I.b;
            b.q_phi = H.q_phi;
            b.kz = H.kz;
            b.proportions = proportions(mesh, H, I, cover);
            std::vector<double> parts(cover.size());
            for (std::size_t m = 0; m < cover.size(); ++m) {
                parts[m] = b.proportions[m] * mesh.areas[cover[m]];
                if (!b.touches_kr_boundary && touches_boundary(mesh, H, cover[m], I))
                    b.touches_kr_boundary = true;
            }
            b.measure = pairwise_sum(parts) * phz_cell_area;
            b.cover = std::move(cover);
            if (!(b.measure > 0.0)) continue;  // closure touches I only at a point or an edge
            auto& dest = b.touches_kr_boundary ? family.excluded : family.retained;
            b.id = dest.size();
            dest.push_back(std::move(b));
        }
    }
    return family;
}

Polygon in_band_polygon(const TriMesh& mesh, const PLHamiltonian& H, std::size_t t, Interval I) {
    const auto c = mesh.corners(t);
    Polygon poly{c[0], c[1], c[2]};
    const auto level = [&](Point2 p) { return H.value_in(mesh, t, p); };
    poly = clip_polygon(poly, [&](Point2 p) { return level(p) - I.a; });
    return clip_polygon(poly, [&](Point2 p) { return I.b - level(p); });
}

namespace {

template <class Visit>
void for_each_sample(const TrajectoryBundle& bundle, const TriMesh& mesh, const PLHamiltonian& H,
                     Visit&& visit) {
    const Interval I{bundle.h_a, bundle.h_b};
    for (std::size_t t : bundle.cover) {
        const Polygon piece = in_band_polygon(mesh, H, t, I);
        if (piece.empty()) continue;
        for (const Point2& p : piece) visit(t, p);
        visit(t, polygon_centroid(piece));
    }
}

}  // namespace

double project_onto_bundle(const std::function<double(double, double, double, double)>& g,
                           const TrajectoryBundle& bundle, const TriMesh& mesh,
                           const PLHamiltonian& H) {
    double best = -INFINITY;
    for_each_sample(bundle, mesh, H, [&](std::size_t, Point2 p) {
        best = std::max(best, g(p.kr, bundle.q_phi, bundle.kz, p.r));
    });
    return best;
}

double project_hamiltonian(const TrajectoryBundle& bundle, const TriMesh& mesh, const PLHamiltonian& H) {
    double best = -INFINITY;
    for_each_sample(bundle, mesh, H,
                    [&](std::size_t t, Point2 p) { best = std::max(best, H.value_in(mesh, t, p)); });
    // The clipped polygon lies in [h_a, h_b] exactly; only rounding can push it out.
    return std::clamp(best, bundle.h_a, bundle.h_b);
}

double PlasmonSpace::phz_cell_area(std::size_t cell) const {
    const std::size_t iq = cell / kz_grid.n;
    const std::size_t ikz = cell % kz_grid.n;
    return q_grid.widths[iq] * kz_grid.widths[ikz];
}

double PlasmonSpace::total_measure() const {
    return mesh.kr_grid.length() * mesh.r_grid.length() * q_grid.length() * kz_grid.length();
}

PlasmonSpace build_plasmon_space(const DispersionModel& model, const TriMesh& mesh,
                                 const RectGrid1D& q_grid, const RectGrid1D& kz_grid, std::size_t n_strata) {
    PlasmonSpace space;
    space.mesh = mesh;
    space.q_grid = q_grid;
    space.kz_grid = kz_grid;
    const std::size_t cells = space.num_phz_cells();
    space.hamiltonians.resize(cells);
    space.strata.resize(cells);
    std::vector<BundleFamily> families(cells);

    parallel_for(cells, [&](std::size_t cell) {
        const std::size_t iq = cell / kz_grid.n;
        const std::size_t ikz = cell % kz_grid.n;
        space.hamiltonians[cell] =
            interpolate_hamiltonian(model, space.mesh, q_grid.centers[iq], kz_grid.centers[ikz], cell);
        space.strata[cell] = stratify(space.hamiltonians[cell], n_strata);
        families[cell] = build_bundles(space.mesh, space.hamiltonians[cell], space.strata[cell], cell,
                                       space.phz_cell_area(cell));
    });

    for (auto& fam : families) {
        for (auto& b : fam.retained) {
            b.id = space.bundles.size();
            space.bundles.push_back(std::move(b));
        }
    }
    for (auto& fam : families) {
        for (auto& b : fam.excluded) {
            b.id = space.bundles.size() + space.excluded.size();
            space.excluded.push_back(std::move(b));
        }
    }

    space.omega.resize(space.bundles.size());
    space.kz.resize(space.bundles.size());
    parallel_for(space.bundles.size(), [&](std::size_t q) {
        const auto& b = space.bundles[q];
        space.omega[q] = project_hamiltonian(b, space.mesh, space.hamiltonians[b.phz_cell]);
        space.kz[q] = b.kz;
    });
    return space;
}

void write_bundle_table(std::ostream& out, const PlasmonSpace& space) {
    out << "id,phz_cell,interval,h_a,h_b,cover_size,measure,retained\n";
    char buf[256];
    auto row = [&](const TrajectoryBundle& b, int retained) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g,%zu,%.17g,%d\n", b.id, b.phz_cell,
                      b.interval, b.h_a, b.h_b, b.cover.size(), b.measure, retained);
        out << buf;
    };
    for (const auto& b : space.bundles) row(b, 1);
    for (const auto& b : space.excluded) row(b, 0);
}

}  // namespace plasmon
