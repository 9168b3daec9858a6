#include "plasmon/ldg.hpp"

#include <cmath>
#include <numbers>

namespace plasmon {

PGridField discrete_grad_par(const PGrid& grid, const PGridField& g) {
    PGridField out(grid);
    for (std::size_t i = 0; i + 1 < grid.n_par(); ++i)
        for (std::size_t j = 0; j < grid.n_perp(); ++j)
            out(i, j) = (g(i + 1, j) - g(i, j)) / grid.par.widths[i];
    return out;
}

PGridField discrete_grad_perp(const PGrid& grid, const PGridField& g) {
    PGridField out(grid);
    for (std::size_t j = 0; j + 1 < grid.n_perp(); ++j) {
        const double w = grid.perp.edges[j + 1] / grid.perp.centers[j];
        for (std::size_t i = 0; i < grid.n_par(); ++i)
            out(i, j) = w * (g(i, j + 1) - g(i, j)) / grid.perp.widths[j];
    }
    return out;
}

PGridField project_px(const PGrid& grid, const std::function<double(double, double)>& g) {
    PGridField out(grid);
    for (std::size_t i = 0; i < grid.n_par(); ++i)
        for (std::size_t j = 0; j < grid.n_perp(); ++j) out(i, j) = g(grid.par.edges[i], grid.perp.edges[j]);
    return out;
}

PGridField sample_centers(const PGrid& grid, const std::function<double(double, double)>& g) {
    PGridField out(grid);
    for (std::size_t i = 0; i < grid.n_par(); ++i)
        for (std::size_t j = 0; j < grid.n_perp(); ++j)
            out(i, j) = g(grid.par.centers[i], grid.perp.centers[j]);
    return out;
}

Eigen::SparseMatrix<double> gradient_matrix(const PGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * n);
    for (std::size_t i = 0; i < grid.n_par(); ++i) {
        for (std::size_t j = 0; j < grid.n_perp(); ++j) {
            const auto c = static_cast<int>(grid.index(i, j));
            if (i + 1 < grid.n_par()) {
                const double inv = 1.0 / grid.par.widths[i];
                trips.emplace_back(c, static_cast<int>(grid.index(i + 1, j)), inv);
                trips.emplace_back(c, c, -inv);
            }
            if (j + 1 < grid.n_perp()) {
                const double w = grid.perp.edges[j + 1] / grid.perp.centers[j] / grid.perp.widths[j];
                const auto row = static_cast<int>(n) + c;
                trips.emplace_back(row, static_cast<int>(grid.index(i, j + 1)), w);
                trips.emplace_back(row, c, -w);
            }
        }
    }
    Eigen::SparseMatrix<double> G(static_cast<int>(2 * n), static_cast<int>(n));
    G.setFromTriplets(trips.begin(), trips.end());
    return G;
}

ElectronSpace build_electron_space(const PGrid& p, const RectGrid1D& r) {
    ElectronSpace s;
    s.p = p;
    s.r = r;
    const auto energy = [](double a, double b) { return std::sqrt(1.0 + a * a + b * b); };
    s.energy = project_px(p, energy);
    s.pz = project_px(p, [](double a, double) { return a; });
    s.dE_par = discrete_grad_par(p, s.energy);
    s.dE_perp = discrete_grad_perp(p, s.energy);
    s.p_volume.resize(p.size());
    s.speed_ratio.resize(p.size());
    for (std::size_t i = 0; i < p.n_par(); ++i) {
        for (std::size_t j = 0; j < p.n_perp(); ++j) {
            const double pp = p.par.centers[i];
            const double pt = p.perp.centers[j];
            const std::size_t c = p.index(i, j);
            s.p_volume[c] = p.par.widths[i] * p.perp.widths[j] * 2.0 * std::numbers::pi * pt;
            s.speed_ratio[c] = std::hypot(pp, pt) / pt;
        }
    }
    s.r_volume.resize(r.n);
    for (std::size_t x = 0; x < r.n; ++x) {
        const double lo = r.edges[x];
        const double hi = r.edges[x + 1];
        s.r_volume[x] = std::numbers::pi * (hi * hi - lo * lo);
    }
    return s;
}

namespace {

// Integral of a linear density over an axis-aligned rectangle or segment is
// its midpoint value times the size.
double cell_weight(const PGrid& grid, std::size_t i, std::size_t j,
                   const std::function<double(double, double)>& weight) {
    return weight(grid.par.centers[i], grid.perp.centers[j]) * grid.par.widths[i] * grid.perp.widths[j];
}

double par_face_weight(const PGrid& grid, std::size_t i_face, std::size_t j,
                       const std::function<double(double, double)>& weight) {
    return weight(grid.par.edges[i_face], grid.perp.centers[j]) * grid.perp.widths[j];
}

double perp_face_weight(const PGrid& grid, std::size_t i, std::size_t j_face,
                        const std::function<double(double, double)>& weight) {
    return weight(grid.par.centers[i], grid.perp.edges[j_face]) * grid.par.widths[i];
}

}  // namespace

GradientField gradient_primal_flux(const PGrid& grid, const PGridField& g,
                                   const std::function<double(double, double)>& weight) {
    const std::size_t I = grid.n_par();
    const std::size_t J = grid.n_perp();
    GradientField out{PGridField(grid), PGridField(grid)};
    // Volume term -int g div(rho v) reduces to -g_K times the boundary flux of
    // rho v, so each face contributes (trace - g_K) rho n.
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const double gk = g(i, j);
            const double upper_par = i + 1 < I ? g(i + 1, j) : gk;
            const double lower_par = gk;  // trace of the lower face comes from this cell
            const double upper_perp = j + 1 < J ? g(i, j + 1) : gk;
            const double lower_perp = gk;
            const double fpar = (upper_par - gk) * par_face_weight(grid, i + 1, j, weight) -
                                (lower_par - gk) * par_face_weight(grid, i, j, weight);
            const double fperp = (upper_perp - gk) * perp_face_weight(grid, i, j + 1, weight) -
                                 (lower_perp - gk) * perp_face_weight(grid, i, j, weight);
            const double vol = cell_weight(grid, i, j, weight);
            out.par(i, j) = fpar / vol;
            out.perp(i, j) = fperp / vol;
        }
    }
    return out;
}

GradientField gradient_dual_flux(const PGrid& grid, const PGridField& g,
                                 const std::function<double(double, double)>& weight) {
    const std::size_t I = grid.n_par();
    const std::size_t J = grid.n_perp();
    GradientField out{PGridField(grid), PGridField(grid)};
    // Weighted divergence of a piecewise-constant field v with traces from the
    // -u side and zero flux through the outer boundary:
    //   (div v)_K |K|_rho = sum over faces of trace(v) . n rho |face|.
    // The gradient solves (grad g, v)_rho = -(g, div v)_rho for every v, so
    // each unit field v = e_d on cell K yields one component.
    auto divergence_pairing = [&](std::size_t ki, std::size_t kj, bool par_dir) {
        // -(g, div e_d^K)_rho: only K and its +d neighbour see the field.
        double acc = 0.0;
        if (par_dir) {
            if (ki + 1 < I) {
                const double flux = par_face_weight(grid, ki + 1, kj, weight);
                acc -= g(ki, kj) * flux;       // outflow through K's upper face
                acc -= g(ki + 1, kj) * (-flux);  // inflow into the neighbour
            }
        } else {
            if (kj + 1 < J) {
                const double flux = perp_face_weight(grid, ki, kj + 1, weight);
                acc -= g(ki, kj) * flux;
                acc -= g(ki, kj + 1) * (-flux);
            }
        }
        return acc;
    };
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const double vol = cell_weight(grid, i, j, weight);
            out.par(i, j) = divergence_pairing(i, j, true) / vol;
            out.perp(i, j) = divergence_pairing(i, j, false) / vol;
        }
    }
    return out;
}

}  // namespace plasmon
