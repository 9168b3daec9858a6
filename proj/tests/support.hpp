#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <functional>
#include <random>
#include <tuple>
#include <vector>

#include "plasmon/bundles.hpp"
#include "plasmon/config.hpp"
#include "plasmon/scenario.hpp"

namespace plasmon::testing {

/// Small deterministic generator wrapper for hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Smooth random field on (k_r, r): a constant plus a few low-frequency
/// sine/cosine modes.
inline std::function<double(double, double)> random_smooth_field(Gen& g) {
    struct Mode {
        double a, kx, ky, ph;
    };
    std::vector<Mode> modes;
    for (int m = 0; m < 4; ++m)
        modes.push_back({g.uniform(0.2, 1.0), g.uniform(-4.0, 4.0), g.uniform(-4.0, 4.0), g.uniform(0.0, 6.283)});
    return [modes](double x, double y) {
        double v = 0.0;
        for (const auto& m : modes) v += m.a * std::sin(m.kx * x + m.ky * y + m.ph);
        return v;
    };
}

/// Configuration small enough for unit tests.
inline RunConfig tiny_config() {
    RunConfig c;
    c.grid.n_p_par = 8;
    c.grid.n_p_perp = 6;
    c.grid.n_r = 4;
    c.grid.n_q_phi = 3;
    c.grid.n_kz = 4;
    c.grid.n_tri_kr = 6;
    c.grid.n_tri_r = 6;
    c.grid.n_strata = 4;
    return c;
}

/// Reduced reference configuration used by the conservation checks.
inline RunConfig desk_config() {
    RunConfig c;
    c.grid.n_p_par = 24;
    c.grid.n_p_perp = 24;
    c.grid.n_r = 8;
    c.grid.n_q_phi = 8;
    c.grid.n_kz = 10;
    c.grid.n_tri_kr = 10;
    c.grid.n_tri_r = 10;
    c.grid.n_strata = 6;
    return c;
}

/// Plasmon space in which the cut-off bundles are kept, so tiny meshes still
/// have bundles to work with.
inline std::shared_ptr<PlasmonSpace> space_with_all_bundles(const DispersionModel& model, const TriMesh& mesh,
                                                            const RectGrid1D& q_grid, const RectGrid1D& kz_grid,
                                                            std::size_t n_strata) {
    auto space = std::make_shared<PlasmonSpace>(build_plasmon_space(model, mesh, q_grid, kz_grid, n_strata));
    std::vector<TrajectoryBundle> all;
    for (auto& b : space->bundles) all.push_back(b);
    for (auto& b : space->excluded) all.push_back(b);
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        return std::tie(x.phz_cell, x.interval, x.cover.front()) < std::tie(y.phz_cell, y.interval, y.cover.front());
    });
    space->bundles = std::move(all);
    space->excluded.clear();
    space->omega.resize(space->bundles.size());
    space->kz.resize(space->bundles.size());
    for (std::size_t q = 0; q < space->bundles.size(); ++q) {
        space->bundles[q].id = q;
        const auto& b = space->bundles[q];
        space->omega[q] = project_hamiltonian(b, space->mesh, space->hamiltonians[b.phz_cell]);
        space->kz[q] = b.kz;
    }
    return space;
}

/// Scenario on the tiny grids with every bundle kept.
struct TinySystem {
    RunConfig config;
    DispersionModel model;
    KernelSpec kernel;
    std::shared_ptr<const ElectronSpace> electrons;
    std::shared_ptr<const PlasmonSpace> plasmons;
    std::shared_ptr<const InteractionOperator> op;
    ConservedWeights weights;
};

inline TinySystem make_tiny_system(RunConfig config, KernelSpec kernel) {
    TinySystem s;
    s.config = config;
    s.model = make_model(config);
    s.kernel = std::move(kernel);
    s.electrons = make_electron_space(config);
    const auto& d = config.domain;
    const auto& g = config.grid;
    const TriMesh mesh =
        build_tri_mesh(build_rect_grid(d.kr.lo, d.kr.hi, g.n_tri_kr), build_rect_grid(d.r.lo, d.r.hi, g.n_tri_r));
    s.plasmons = space_with_all_bundles(s.model, mesh, build_rect_grid(d.q_phi.lo, d.q_phi.hi, g.n_q_phi),
                                        build_rect_grid(d.kz.lo, d.kz.hi, g.n_kz), g.n_strata);
    s.op = std::make_shared<const InteractionOperator>(s.electrons, s.plasmons, s.kernel, s.model);
    s.weights = conserved_weights(*s.electrons, *s.plasmons);
    return s;
}

inline TinySystem make_tiny_system(RunConfig config = tiny_config()) {
    return make_tiny_system(config, make_kernel(config));
}

}  // namespace plasmon::testing
