#include "plasmon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "plasmon/errors.hpp"
#include "plasmon/numerics.hpp"
#include "plasmon/parallel.hpp"

namespace plasmon {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::fully_explicit: return "fully_explicit";
        case Scheme::semi_implicit_f: return "semi_implicit_f";
        case Scheme::semi_implicit_N: return "semi_implicit_N";
        case Scheme::fully_implicit: return "fully_implicit";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "fully_explicit" || name == "explicit") return Scheme::fully_explicit;
    if (name == "semi_implicit_f") return Scheme::semi_implicit_f;
    if (name == "semi_implicit_N") return Scheme::semi_implicit_N;
    if (name == "fully_implicit") return Scheme::fully_implicit;
    throw ConfigError("unknown scheme '" + name +
                      "' (expected fully_explicit, semi_implicit_f, semi_implicit_N or fully_implicit)");
}

double l2_norm(const ElectronSpace& electrons, const std::vector<double>& f) {
    const std::size_t np = electrons.num_p();
    std::vector<double> terms(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        terms[k] = electrons.mass_weight(k / np, k % np) * f[k] * f[k];
    return std::sqrt(pairwise_sum(terms));
}

double dt_positivity(const std::vector<double>& rates, double delta, bool implicit_update) {
    double worst = 0.0;
    for (double q : rates) worst = std::max(worst, implicit_update ? q : -q);
    if (!(worst > 0.0)) return std::numeric_limits<double>::infinity();
    return (1.0 - delta) / worst;
}

double dt_positivity(const InteractionOperator& op, const SystemState& state, double delta, bool implicit_update) {
    std::vector<double> rates;
    op.reaction_rates(state.f, rates);
    return dt_positivity(rates, delta, implicit_update);
}

double dt_cfl(const std::vector<std::array<double, 3>>& diffusion, const PGrid& grid) {
    const std::size_t np = grid.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < diffusion.size(); ++k) {
        const std::size_t c = k % np;
        const double dx = grid.par.widths[c / grid.n_perp()];
        const double dy = grid.perp.widths[c % grid.n_perp()];
        const auto& D = diffusion[k];
        const double denom = 2.0 * (D[0] * dy * dy + 2.0 * std::abs(D[1]) * dx * dy + D[2] * dx * dx);
        if (!(denom > 0.0)) continue;
        best = std::min(best, dx * dx * dy * dy / denom);
    }
    return 0.45 * best;
}

namespace {

void check_state(const SystemState& s) {
    for (double v : s.f)
        if (!std::isfinite(v)) throw StepFailure("non-finite electron coefficient");
    for (std::size_t q = 0; q < s.N.size(); ++q) {
        if (!std::isfinite(s.N[q])) throw StepFailure("non-finite plasmon coefficient for bundle " + std::to_string(q));
        if (s.N[q] < 0.0) throw StepFailure("negative plasmon coefficient for bundle " + std::to_string(q));
    }
}

/// Solves (M + dt A[N]) x = M a slice by slice, A = G^T W D[N] G.
class ImplicitDiffusion {
public:
    explicit ImplicitDiffusion(const InteractionOperator& op) : op_(op), G_(gradient_matrix(op.electrons().p)) {
        Gt_ = G_.transpose();
    }

    double solve(const std::vector<double>& N, const std::vector<double>& a, double dt, std::vector<double>& x) const {
        const ElectronSpace& el = op_.electrons();
        const std::size_t np = el.num_p();
        const std::size_t nr = el.num_r();
        x.assign(a.size(), 0.0);
        std::vector<double> residuals(nr, 0.0);
        parallel_for(nr, [&](std::size_t xi) {
            std::vector<Eigen::Triplet<double>> trips;
            trips.reserve(4 * np);
            const int n = static_cast<int>(np);
            for (std::size_t c = 0; c < np; ++c) {
                const auto D = op_.diffusion_tensor(N, xi, c);
                const double w = el.p_volume[c];
                const int k = static_cast<int>(c);
                if (D[0] != 0.0) trips.emplace_back(k, k, w * D[0]);
                if (D[1] != 0.0) {
                    trips.emplace_back(k, n + k, w * D[1]);
                    trips.emplace_back(n + k, k, w * D[1]);
                }
                if (D[2] != 0.0) trips.emplace_back(n + k, n + k, w * D[2]);
            }
            Eigen::SparseMatrix<double> B(2 * n, 2 * n);
            B.setFromTriplets(trips.begin(), trips.end());
            Eigen::SparseMatrix<double> A = Gt_ * B * G_;
            Eigen::VectorXd mass(n);
            for (std::size_t c = 0; c < np; ++c) mass[static_cast<int>(c)] = el.mass_weight(xi, c);
            Eigen::SparseMatrix<double> S = dt * A;
            for (int c = 0; c < n; ++c) S.coeffRef(c, c) += mass[c];
            S.makeCompressed();

            Eigen::VectorXd rhs(n);
            for (int c = 0; c < n; ++c) rhs[c] = mass[c] * a[xi * np + static_cast<std::size_t>(c)];
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
            if (ldlt.info() != Eigen::Success) throw StepFailure("implicit diffusion factorization failed");
            Eigen::VectorXd sol = ldlt.solve(rhs);
            const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
            double res = (S * sol - rhs).norm() / scale;
            for (int pass = 0; pass < 3 && res > 1e-12; ++pass) {
                sol += ldlt.solve(rhs - S * sol);
                res = (S * sol - rhs).norm() / scale;
            }
            if (!(res <= 1e-12)) {
                std::ostringstream msg;
                msg << "implicit diffusion solve on r-cell " << xi << " stalled at relative residual " << res;
                throw StepFailure(msg.str());
            }
            residuals[xi] = res;
            for (int c = 0; c < n; ++c) x[xi * np + static_cast<std::size_t>(c)] = sol[c];
        });
        return *std::max_element(residuals.begin(), residuals.end());
    }

private:
    const InteractionOperator& op_;
    Eigen::SparseMatrix<double> G_;
    Eigen::SparseMatrix<double> Gt_;
};

double relative_change(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff = std::max(diff, std::abs(a[k] - b[k]));
        scale = std::max(scale, std::abs(a[k]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

std::vector<double> implicit_plasmon_update(const std::vector<double>& N, const std::vector<double>& rates,
                                            double dt) {
    std::vector<double> out(N.size());
    for (std::size_t q = 0; q < N.size(); ++q) {
        const double denom = 1.0 - dt * rates[q];
        if (!(denom > 0.0))
            throw StepFailure("implicit plasmon update singular for bundle " + std::to_string(q));
        out[q] = N[q] / denom;
    }
    return out;
}

}  // namespace

SystemState step(const InteractionOperator& op, const SystemState& state, double dt, Scheme scheme,
                 StepInfo* info) {
    SystemState next;
    next.t = state.t + dt;
    next.step = state.step + 1;
    const std::size_t nb = state.N.size();
    std::vector<double> rate_f;
    std::vector<double> rates;

    // Every branch ends with f^{n+1} = f^n + dt * f_rate(N*, x) and an N update
    // driven by reaction_rates(x) with the same N*, so the discrete mass and
    // energy pairing is exact whatever x and N* are.
    switch (scheme) {
        case Scheme::fully_explicit: {
            op.f_rate(state.N, state.f, rate_f);
            op.reaction_rates(state.f, rates);
            next.N.resize(nb);
            for (std::size_t q = 0; q < nb; ++q) next.N[q] = state.N[q] * (1.0 + dt * rates[q]);
            next.f = state.f;
            for (std::size_t k = 0; k < next.f.size(); ++k) next.f[k] += dt * rate_f[k];
            break;
        }
        case Scheme::semi_implicit_f: {
            std::vector<double> x;
            const double res = op.empty() ? 0.0 : ImplicitDiffusion(op).solve(state.N, state.f, dt, x);
            if (op.empty()) x = state.f;
            if (info) info->linear_residual = res;
            op.f_rate(state.N, x, rate_f);
            op.reaction_rates(x, rates);
            next.N.resize(nb);
            for (std::size_t q = 0; q < nb; ++q) next.N[q] = state.N[q] * (1.0 + dt * rates[q]);
            next.f = state.f;
            for (std::size_t k = 0; k < next.f.size(); ++k) next.f[k] += dt * rate_f[k];
            break;
        }
        case Scheme::semi_implicit_N: {
            op.reaction_rates(state.f, rates);
            next.N = implicit_plasmon_update(state.N, rates, dt);
            op.f_rate(next.N, state.f, rate_f);
            next.f = state.f;
            for (std::size_t k = 0; k < next.f.size(); ++k) next.f[k] += dt * rate_f[k];
            break;
        }
        case Scheme::fully_implicit: {
            std::vector<double> x = state.f;
            std::vector<double> N_iter = state.N;
            if (op.empty()) {
                next.f = state.f;
                next.N = state.N;
                break;
            }
            const ImplicitDiffusion solver(op);
            bool converged = false;
            std::size_t it = 0;
            double res = 0.0;
            while (it < 50) {
                ++it;
                std::vector<double> x_new;
                res = std::max(res, solver.solve(N_iter, state.f, dt, x_new));
                op.reaction_rates(x_new, rates);
                std::vector<double> N_new = implicit_plasmon_update(state.N, rates, dt);
                const double change = std::max(relative_change(x_new, x), relative_change(N_new, N_iter));
                x = std::move(x_new);
                N_iter = std::move(N_new);
                if (change < 1e-12) {
                    converged = true;
                    break;
                }
            }
            if (info) {
                info->fixed_point_iterations = it;
                info->linear_residual = res;
            }
            if (!converged) throw StepFailure("fully implicit fixed-point iteration did not converge in 50 iterations");
            // Pair the final N with the x that produced it.
            op.reaction_rates(x, rates);
            next.N = implicit_plasmon_update(state.N, rates, dt);
            op.f_rate(next.N, x, rate_f);
            next.f = state.f;
            for (std::size_t k = 0; k < next.f.size(); ++k) next.f[k] += dt * rate_f[k];
            break;
        }
    }
    check_state(next);
    return next;
}

SystemState run(const InteractionOperator& op, SystemState state, const RunOptions& options,
                const StepObserver& observer) {
    if (!(options.t_max >= 0.0)) throw ConfigError("t_max must be non-negative");
    if (!(options.delta > 0.0 && options.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (!(options.safety > 0.0 && options.safety <= 1.0)) throw ConfigError("safety must lie in (0, 1]");
    if (observer) observer(state, StepRecord{state.step, state.t, 0.0, "initial"});

    const bool explicit_f = options.scheme == Scheme::fully_explicit || options.scheme == Scheme::semi_implicit_N;
    const bool implicit_n = options.scheme == Scheme::semi_implicit_N || options.scheme == Scheme::fully_implicit;
    std::size_t taken = 0;
    while (state.t < options.t_max && (options.max_steps == 0 || taken < options.max_steps)) {
        const double remaining = options.t_max - state.t;
        double bound = std::numeric_limits<double>::infinity();
        std::string which = "t_max";
        const double pos = dt_positivity(op, state, options.delta, implicit_n);
        if (pos < bound) {
            bound = pos;
            which = "positivity";
        }
        if (explicit_f) {
            const double cfl = dt_cfl(op.diffusion_field(state.N), op.electrons().p);
            if (cfl < bound) {
                bound = cfl;
                which = "cfl";
            }
        }
        double dt = options.safety * bound;
        if (!(dt < remaining)) {
            dt = remaining;
            which = "t_max";
        }

        SystemState next;
        for (int attempt = 0;; ++attempt) {
            try {
                next = step(op, state, dt, options.scheme);
                break;
            } catch (const StepFailure&) {
                // A bound evaluated at t^n can be too loose for the implicit
                // variants; retry with smaller steps before giving up.
                if (attempt >= 30) throw;
                dt *= 0.5;
                which = "retry";
            }
        }
        if (which == "t_max") next.t = options.t_max;
        state = std::move(next);
        ++taken;
        if (observer) observer(state, StepRecord{state.step, state.t, dt, which});
    }
    return state;
}

}  // namespace plasmon
