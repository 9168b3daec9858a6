#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "plasmon/interaction.hpp"

namespace plasmon {

enum class Scheme { fully_explicit, semi_implicit_f, semi_implicit_N, fully_implicit };

std::string to_string(Scheme s);
/// Throws ConfigError for an unknown name.
Scheme parse_scheme(const std::string& name);

/// Electron coefficients f (index xi * n_p + c) and plasmon coefficients N (per bundle).
struct SystemState {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<double> f;
    std::vector<double> N;
};

/// Weighted L2 norm sqrt(sum M a^2) of the electron coefficients.
double l2_norm(const ElectronSpace& electrons, const std::vector<double>& f);

/// Largest step keeping every plasmon coefficient above delta times its
/// current value. For the explicit update N(1 + dt q) the binding rates are
/// the negative ones; for the implicit update N / (1 - dt q) the positive ones.
/// Returns +inf when no rate binds.
double dt_positivity(const std::vector<double>& rates, double delta, bool implicit_update = false);
double dt_positivity(const InteractionOperator& op, const SystemState& state, double delta,
                     bool implicit_update = false);

/// Explicit diffusion bound
///   0.45 min_c dx^2 dy^2 / (2 (D11 dy^2 + 2 |D12| dx dy + D22 dx^2))
/// over a diffusion field with one (D11, D12, D22) triple per cell (r-major).
double dt_cfl(const std::vector<std::array<double, 3>>& diffusion, const PGrid& grid);

struct StepInfo {
    std::size_t fixed_point_iterations = 0;
    double linear_residual = 0.0;
};

/// One step of the chosen first-order scheme. Throws StepFailure on a
/// non-finite state, a negative plasmon coefficient or an implicit solve
/// that does not converge.
SystemState step(const InteractionOperator& op, const SystemState& state, double dt, Scheme scheme,
                 StepInfo* info = nullptr);

struct RunOptions {
    Scheme scheme = Scheme::fully_explicit;
    double delta = 0.1;
    double safety = 0.9;
    double t_max = 0.0;
    std::size_t max_steps = 0;  // 0: no limit
};

struct StepRecord {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    std::string bound;  // "cfl", "positivity" or "t_max"
};

/// Observer called after every accepted step (and once for the initial state
/// with step 0 and dt 0).
using StepObserver = std::function<void(const SystemState&, const StepRecord&)>;

/// Adaptive run to t_max. A StepFailure propagates after the observer has
/// seen the last good state.
SystemState run(const InteractionOperator& op, SystemState state, const RunOptions& options,
                const StepObserver& observer = {});

}  // namespace plasmon
