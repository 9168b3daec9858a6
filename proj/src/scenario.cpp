#include "plasmon/scenario.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace plasmon {

DispersionModel make_model(const RunConfig& config) {
    PlasmaParameters params;
    params.profile = config.physics.profile;
    params.omega_pe0 = config.physics.omega_pe0;
    params.omega_ce0 = config.physics.b0;
    params.r_max = config.domain.r.hi;
    return make_default_model(params);
}

std::function<double(double, double, double, double, double, double)> make_random_amplitude(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Mode {
        double weight;
        std::array<double, 6> freq;
        double phase;
    };
    const double c0 = unit(rng);
    std::vector<Mode> modes(3);
    for (auto& m : modes) {
        m.weight = unit(rng);
        // Frequencies scaled to the natural size of each variable.
        const std::array<double, 6> scale{0.5, 0.5, 4.0, 8.0, 4.0, 6.0};
        for (std::size_t d = 0; d < 6; ++d) m.freq[d] = scale[d] * unit(rng);
        m.phase = 2.0 * std::numbers::pi * unit(rng);
    }
    return [c0, modes](double p_par, double p_perp, double kr, double q_phi, double kz, double r) {
        const std::array<double, 6> x{p_par, p_perp, kr, q_phi, kz, r};
        double u = c0;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (std::size_t d = 0; d < 6; ++d) arg += m.freq[d] * x[d];
            u += m.weight * 0.5 * (1.0 + std::sin(arg));
        }
        return u;
    };
}

KernelSpec make_kernel(const RunConfig& config) {
    KernelSpec spec;
    spec.harmonic = config.physics.harmonic;
    spec.epsilon = config.physics.epsilon;
    if (config.physics.amplitude == "random") spec.amplitude = make_random_amplitude(config.physics.amplitude_seed);
    return spec;
}

std::shared_ptr<const ElectronSpace> make_electron_space(const RunConfig& config) {
    const auto& d = config.domain;
    const auto& g = config.grid;
    PGrid p{build_rect_grid(d.p_par.lo, d.p_par.hi, g.n_p_par), build_rect_grid(d.p_perp.lo, d.p_perp.hi, g.n_p_perp)};
    return std::make_shared<const ElectronSpace>(build_electron_space(p, build_rect_grid(d.r.lo, d.r.hi, g.n_r)));
}

std::shared_ptr<const PlasmonSpace> make_plasmon_space(const RunConfig& config, const DispersionModel& model) {
    const auto& d = config.domain;
    const auto& g = config.grid;
    const TriMesh mesh =
        build_tri_mesh(build_rect_grid(d.kr.lo, d.kr.hi, g.n_tri_kr), build_rect_grid(d.r.lo, d.r.hi, g.n_tri_r));
    return std::make_shared<const PlasmonSpace>(build_plasmon_space(model, mesh,
                                                                    build_rect_grid(d.q_phi.lo, d.q_phi.hi, g.n_q_phi),
                                                                    build_rect_grid(d.kz.lo, d.kz.hi, g.n_kz),
                                                                    g.n_strata));
}

Scenario build_scenario(const RunConfig& config) {
    Scenario s;
    s.config = config;
    s.model = make_model(config);
    s.kernel = make_kernel(config);
    s.electrons = make_electron_space(config);
    s.plasmons = make_plasmon_space(config, s.model);
    s.op = std::make_shared<const InteractionOperator>(s.electrons, s.plasmons, s.kernel, s.model);
    s.weights = conserved_weights(*s.electrons, *s.plasmons);
    return s;
}

SystemState initial_conditions(const RunConfig& config, const ElectronSpace& electrons, const PlasmonSpace& plasmons) {
    SystemState state;
    const double a = config.initial.f_amplitude / std::sqrt(std::numbers::pi);
    const double center = config.initial.f_center;
    const PGridField bump = sample_centers(electrons.p, [&](double pp, double pt) {
        const double x = pp - center;
        return a * std::exp(-x * x - pt * pt);
    });
    state.f.resize(electrons.size());
    for (std::size_t xi = 0; xi < electrons.num_r(); ++xi)
        std::copy(bump.values.begin(), bump.values.end(), state.f.begin() + static_cast<long>(xi * electrons.num_p()));
    state.N.assign(plasmons.bundles.size(), config.initial.n_amplitude);
    return state;
}

}  // namespace plasmon
