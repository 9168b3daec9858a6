#pragma once

#include <cstdint>
#include <memory>

#include "plasmon/bundles.hpp"
#include "plasmon/config.hpp"
#include "plasmon/diagnostics.hpp"
#include "plasmon/interaction.hpp"
#include "plasmon/ldg.hpp"
#include "plasmon/solver.hpp"

namespace plasmon {

DispersionModel make_model(const RunConfig& config);

/// Smooth non-negative amplitude c0 + sum_i c_i (1 + sin(phase_i)) / 2 with
/// random coefficients and phases drawn from `seed`.
std::function<double(double, double, double, double, double, double)> make_random_amplitude(std::uint64_t seed);

KernelSpec make_kernel(const RunConfig& config);

std::shared_ptr<const ElectronSpace> make_electron_space(const RunConfig& config);
std::shared_ptr<const PlasmonSpace> make_plasmon_space(const RunConfig& config, const DispersionModel& model);

/// Everything a run needs, built from one configuration.
struct Scenario {
    RunConfig config;
    DispersionModel model;
    KernelSpec kernel;
    std::shared_ptr<const ElectronSpace> electrons;
    std::shared_ptr<const PlasmonSpace> plasmons;
    std::shared_ptr<const InteractionOperator> op;
    ConservedWeights weights;
};

Scenario build_scenario(const RunConfig& config);

/// Gaussian bump a / sqrt(pi) exp(-(p_par - center)^2 - p_perp^2) sampled at
/// cell centers on every r-cell, and the same constant on every bundle.
SystemState initial_conditions(const RunConfig& config, const ElectronSpace& electrons, const PlasmonSpace& plasmons);

}  // namespace plasmon
