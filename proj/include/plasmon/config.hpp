#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "plasmon/hamiltonian.hpp"
#include "plasmon/solver.hpp"

namespace plasmon {

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
};

/// Complete description of a run. Defaults reproduce the reference cylinder
/// scenario; see `plasmon preset`.
struct RunConfig {
    struct Domain {
        Bounds p_par{10.0, 25.0};
        Bounds p_perp{0.0, 15.0};
        Bounds r{0.0, 1.0};
        Bounds kr{-1.0, 1.0};
        Bounds q_phi{0.0, 0.5};
        Bounds kz{0.0, 1.0};
    } domain;

    struct Grid {
        std::size_t n_p_par = 75;
        std::size_t n_p_perp = 75;
        std::size_t n_r = 20;
        std::size_t n_q_phi = 20;
        std::size_t n_kz = 40;
        std::size_t n_tri_kr = 20;
        std::size_t n_tri_r = 20;
        std::size_t n_strata = 10;
    } grid;

    struct Physics {
        DensityProfile profile = DensityProfile::parabolic;
        double omega_pe0 = 1.0;
        double b0 = 1.0;
        int harmonic = 1;
        double epsilon = 0.1;
        std::string amplitude = "constant";  // or "random"
        std::uint64_t amplitude_seed = 1;
    } physics;

    struct Initial {
        double f_amplitude = 1e-5;
        double f_center = 20.0;  // p_par of the Gaussian bump
        double n_amplitude = 1e-5;
    } initial;

    struct Solver {
        Scheme scheme = Scheme::fully_explicit;
        double delta = 0.1;
        double safety = 0.9;
        double t_max = 3.86e6;
        std::size_t max_steps = 0;
    } solver;

    struct Output {
        std::string dir = "out";
        std::size_t diagnostics_every = 1;
        std::size_t snapshot_every = 0;  // 0: final state only
    } output;
};

/// Parses `key = value` lines, grouped either under `[section]` headers or
/// written as `section.key = value`. `#` starts a comment. Missing keys keep
/// their defaults; unknown keys, malformed values and invalid combinations
/// throw ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

/// Checks ranges and orderings; throws ConfigError naming the key.
void validate(const RunConfig& config);

/// 64-bit FNV-1a hash of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace plasmon
