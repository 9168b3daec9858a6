// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plasmon/audit.hpp"
#include "plasmon/bundles.hpp"
#include "plasmon/diagnostics.hpp"
#include "plasmon/geometry.hpp"
#include "plasmon/ldg.hpp"
#include "plasmon/scenario.hpp"
#include "plasmon/solver.hpp"
#include "support.hpp"

using namespace plasmon;
using plasmon::testing::Gen;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr double kMassTol = 1e-13;
constexpr double kEnergyTol = 1e-13;
constexpr double kMomentumTol = 1e-11;
constexpr std::size_t kConservationSteps = 500;

struct Drift {
    double mass = 0.0, momentum = 0.0, energy = 0.0, last_column = 0.0;
    std::size_t steps = 0;
    bool ok() const { return mass <= kMassTol && energy <= kEnergyTol && momentum <= kMomentumTol; }
};

Drift conservation_run(const RunConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const SystemState s0 = initial_conditions(cfg, *sc.electrons, *sc.plasmons);
    const ConservationRecord ref = totals(sc.weights, s0);
    RunOptions opts;
    opts.scheme = Scheme::fully_explicit;
    opts.delta = cfg.solver.delta;
    opts.safety = cfg.solver.safety;
    opts.t_max = cfg.solver.t_max;
    opts.max_steps = kConservationSteps;
    Drift d;
    const SystemState end = run(*sc.op, s0, opts, [&](const SystemState& s, const StepRecord& r) {
        ConservationRecord rec = totals(sc.weights, s);
        set_relative_errors(rec, ref);
        d.mass = std::max(d.mass, rec.e_rel_mass);
        d.momentum = std::max(d.momentum, rec.e_rel_momentum);
        d.energy = std::max(d.energy, rec.e_rel_energy);
        d.steps = r.step;
    });
    d.last_column = last_column_mass(*sc.electrons, end.f) / std::max(ref.mass, 1e-300);
    return d;
}

Outcome criterion_conservation() {
    const Drift d = conservation_run(plasmon::testing::desk_config());
    return {d.ok() && d.steps >= kConservationSteps,
            fmt("%zu steps, max e_rel mass %.2e energy %.2e momentum_z %.2e, last-column mass fraction %.2e", d.steps,
                d.mass, d.energy, d.momentum, d.last_column)};
}

Outcome criterion_kernel_independence() {
    Drift worst;
    std::size_t runs = 0, failures = 0;
    for (double eps : {0.02, 0.1, 0.3}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            RunConfig cfg = plasmon::testing::desk_config();
            cfg.physics.amplitude = "random";
            cfg.physics.amplitude_seed = 1000 + seed;
            cfg.physics.epsilon = eps;
            const Drift d = conservation_run(cfg);
            ++runs;
            if (!d.ok() || d.steps < kConservationSteps) ++failures;
            worst.mass = std::max(worst.mass, d.mass);
            worst.momentum = std::max(worst.momentum, d.momentum);
            worst.energy = std::max(worst.energy, d.energy);
        }
    }
    return {failures == 0, fmt("%zu runs, %zu failing; worst e_rel mass %.2e energy %.2e momentum_z %.2e", runs,
                               failures, worst.mass, worst.energy, worst.momentum)};
}

Outcome criterion_component_oracle() {
    Gen gen(303);
    const TriMesh mesh = build_tri_mesh(build_rect_grid(-1.0, 1.0, 16), build_rect_grid(0.0, 1.0, 16));
    std::size_t cases = 0, agree = 0, points = 0, mismatched = 0, components = 0;
    for (int f = 0; f < 10; ++f) {
        const auto H = sample_pl_hamiltonian(mesh, plasmon::testing::random_smooth_field(gen));
        const Stratification strat = stratify(H, 5);
        for (std::size_t j = 0; j < strat.num_intervals(); ++j) {
            const auto cmp = compare_with_oracle(mesh, H, {strat.levels[j], strat.levels[j + 1]}, 400);
            ++cases;
            agree += cmp.agree ? 1 : 0;
            points += cmp.sampled_points;
            mismatched += cmp.mismatched_points;
            components += cmp.mesh_components;
        }
    }
    return {agree == cases && mismatched == 0,
            fmt("%zu/%zu intervals agree, %zu components, %zu/%zu lattice points mismatched", agree, cases,
                components, mismatched, points)};
}

Outcome criterion_proportions() {
    Gen gen(404);
    constexpr std::size_t kSamples = 1'000'000;
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t within = 0, total = 0;
    double worst_z = 0.0;
    while (total < 1000) {
        const std::array<Point2, 3> tri{Point2{gen.uniform(-1, 1), gen.uniform(-1, 1)},
                                        Point2{gen.uniform(-1, 1), gen.uniform(-1, 1)},
                                        Point2{gen.uniform(-1, 1), gen.uniform(-1, 1)}};
        const double area = 0.5 * std::abs((tri[1].kr - tri[0].kr) * (tri[2].r - tri[0].r) -
                                           (tri[2].kr - tri[0].kr) * (tri[1].r - tri[0].r));
        if (area < 1e-3) continue;
        const std::array<double, 3> vals{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
        double a = gen.uniform(-1.2, 1.2), b = gen.uniform(-1.2, 1.2);
        if (a > b) std::swap(a, b);
        if (gen.uniform() < 0.1) b = inf;
        if (gen.uniform() < 0.1) a = -inf;
        const Interval I{a, b};
        const double r = triangle_proportion(vals, I);
        const auto mc = monte_carlo_measure(tri, vals, I, kSamples, 9000 + total);
        const double se = area * std::sqrt(r * (1.0 - r) / static_cast<double>(kSamples));
        const double diff = std::abs(mc.value - r * area);
        const bool ok = se > 0.0 ? diff <= 4.0 * se : diff <= 1e-12 * area;
        if (se > 0.0) worst_z = std::max(worst_z, diff / se);
        within += ok ? 1 : 0;
        ++total;
    }
    const double degenerate = triangle_proportion({0.0, 0.0, 1.0}, {0.5, inf});
    return {within == total && degenerate == 0.25,
            fmt("%zu/%zu within 4 SE (worst |z| %.2f), degenerate case %.17g", within, total, worst_z, degenerate)};
}

Outcome criterion_additivity() {
    const RunConfig cfg = plasmon::testing::desk_config();
    const auto space = make_plasmon_space(cfg, make_model(cfg));
    const double defect = measure_additivity_defect(*space);
    return {defect <= 1e-10, fmt("relative defect %.2e over %zu retained + %zu excluded bundles", defect,
                                 space->bundles.size(), space->excluded.size())};
}

Outcome criterion_flow() {
    const RunConfig cfg = plasmon::testing::desk_config();
    const auto space = make_plasmon_space(cfg, make_model(cfg));
    const TriMesh& mesh = space->mesh;
    Gen gen(606);
    double worst = 0.0;
    std::size_t seeds = 0, steps = 0, left = 0, crossings = 0;
    constexpr double kTol = 1e-8;
    while (seeds < 50) {
        const auto& b = space->bundles[gen.index(0, space->bundles.size() - 1)];
        const std::size_t t = b.cover[gen.index(0, b.cover.size() - 1)];
        const auto& H = space->hamiltonians[b.phz_cell];
        const Polygon piece = in_band_polygon(mesh, H, t, {b.h_a, b.h_b});
        if (polygon_area(piece) <= 0.0) continue;
        const PiecewiseLinearFlow flow(mesh, H);
        auto s = flow.start(polygon_centroid(piece));
        const double speed = std::hypot(flow.velocity(s.triangle).kr, flow.velocity(s.triangle).r);
        // Level sets of this dispersion are open, so orbits eventually exit
        // through r = 1; the step is short enough for 10^3 steps to stay inside
        // while still crossing several triangles.
        const double tau = speed > 0.0 ? 0.005 * mesh.r_grid.widths[0] / speed : 1.0;
        ++seeds;
        for (int k = 0; k < 1000; ++k) {
            const std::size_t before = s.triangle;
            s = flow.advance(s, tau);
            crossings += s.triangle != before ? 1 : 0;
            if (s.left_domain) {
                ++left;
                break;
            }
            ++steps;
            const double w = H.value_at(mesh, s.position);
            worst = std::max({worst, b.h_a - w, w - b.h_b});
        }
    }
    return {worst <= kTol, fmt("%zu seeds, %zu flow steps, %zu triangle crossings, %zu orbits left the domain, "
                               "worst band excursion %.2e",
                               seeds, steps, crossings, left, std::max(worst, 0.0))};
}

Outcome criterion_positivity() {
    RunConfig cfg = plasmon::testing::desk_config();
    cfg.initial.f_amplitude = 1.0;
    cfg.initial.n_amplitude = 1.0;
    const Scenario sc = build_scenario(cfg);
    const SystemState s0 = initial_conditions(cfg, *sc.electrons, *sc.plasmons);

    // Adaptive runs.
    double min_n = std::numeric_limits<double>::infinity();
    std::size_t positivity_bound = 0, adaptive_steps = 0;
    for (Scheme scheme : {Scheme::fully_explicit, Scheme::semi_implicit_N}) {
        RunOptions opts;
        opts.scheme = scheme;
        opts.t_max = cfg.solver.t_max;
        opts.max_steps = 200;
        run(*sc.op, s0, opts, [&](const SystemState& s, const StepRecord& r) {
            for (double v : s.N) min_n = std::min(min_n, v);
            positivity_bound += r.bound == "positivity" ? 1 : 0;
            adaptive_steps += r.step > 0 ? 1 : 0;
        });
    }

    // Explicit steps at 0.99 of the positivity bound from random states.
    Gen gen(707);
    const double delta = 0.1;
    std::size_t violations = 0, trials = 0;
    for (int k = 0; k < 50; ++k) {
        SystemState s = s0;
        for (double& v : s.f) v *= gen.uniform(0.5, 1.5);
        for (double& v : s.N) v = gen.uniform(0.01, 2.0);
        const double dt = 0.99 * dt_positivity(*sc.op, s, delta);
        if (!std::isfinite(dt)) continue;
        ++trials;
        const SystemState next = step(*sc.op, s, dt, Scheme::fully_explicit);
        for (std::size_t q = 0; q < s.N.size(); ++q) violations += next.N[q] < delta * s.N[q] ? 1 : 0;
    }

    // Semi-implicit electron update beyond the explicit limit.
    RunConfig quiet = plasmon::testing::desk_config();
    quiet.initial.n_amplitude = 1.0;
    const Scenario sq = build_scenario(quiet);
    SystemState s = initial_conditions(quiet, *sq.electrons, *sq.plasmons);
    std::size_t increases = 0, clipped = 0;
    for (int k = 0; k < 200; ++k) {
        double dt = 10.0 * dt_cfl(sq.op->diffusion_field(s.N), sq.electrons->p);
        const double pos = 0.9 * dt_positivity(*sq.op, s, delta);
        if (pos < dt) {
            dt = pos;
            ++clipped;
        }
        const double before = l2_norm(*sq.electrons, s.f);
        s = step(*sq.op, s, dt, Scheme::semi_implicit_f);
        increases += l2_norm(*sq.electrons, s.f) > before ? 1 : 0;
    }

    const bool pass = min_n >= 0.0 && violations == 0 && trials > 0 && increases == 0 && clipped == 0;
    return {pass, fmt("adaptive min N %.3e over %zu steps (%zu positivity-bound); %zu trials at 0.99 dt_M with %zu "
                      "violations; semi_implicit_f at 10 dt_cfl: %zu L2 increases in 200 steps",
                      min_n, adaptive_steps, positivity_bound, trials, violations, increases)};
}

Outcome criterion_operator_identities() {
    const RunConfig cfg = plasmon::testing::desk_config();
    const auto e = make_electron_space(cfg);
    const PGrid& g = e->p;

    PGridField one(g, 1.0);
    double constant_residual = 0.0;
    for (const auto& f : {discrete_grad_par(g, one), discrete_grad_perp(g, one)})
        for (double v : f.values) constant_residual = std::max(constant_residual, std::abs(v));
    const auto G = gradient_matrix(g);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
    constant_residual = std::max(constant_residual, (G * ones).cwiseAbs().maxCoeff());

    double momentum_residual = 0.0;
    const auto dpz = discrete_grad_par(g, e->pz);
    for (std::size_t i = 0; i + 1 < g.n_par(); ++i)
        for (std::size_t j = 0; j < g.n_perp(); ++j)
            momentum_residual = std::max(momentum_residual, std::abs(1.0 - dpz(i, j)));

    Gen gen(808);
    const auto rho = [](double, double pt) { return 2.0 * M_PI * pt; };
    double flux_residual = 0.0;
    for (int k = 0; k < 20; ++k) {
        PGridField f(g);
        for (double& v : f.values) v = gen.uniform(-1, 1);
        const auto u = gradient_primal_flux(g, f, rho);
        const auto d = gradient_dual_flux(g, f, rho);
        double scale = 0.0;
        for (double v : u.par.values) scale = std::max(scale, std::abs(v));
        for (double v : u.perp.values) scale = std::max(scale, std::abs(v));
        for (std::size_t c = 0; c < g.size(); ++c) {
            flux_residual = std::max(flux_residual, std::abs(u.par.values[c] - d.par.values[c]) / scale);
            flux_residual = std::max(flux_residual, std::abs(u.perp.values[c] - d.perp.values[c]) / scale);
        }
    }
    return {constant_residual == 0.0 && momentum_residual <= 1e-12 && flux_residual <= 1e-13,
            fmt("constant gradient %.1e, max |1 - d_par Pi p_z| %.2e on interior columns, flux mismatch %.2e",
                constant_residual, momentum_residual, flux_residual)};
}

Outcome criterion_temporal_order() {
    RunConfig cfg = plasmon::testing::tiny_config();
    cfg.initial.f_amplitude = 1.0;
    cfg.initial.n_amplitude = 1.0;
    const auto sys = plasmon::testing::make_tiny_system(cfg);
    const SystemState s0 = initial_conditions(cfg, *sys.electrons, *sys.plasmons);
    const double T = 4.0 * dt_cfl(sys.op->diffusion_field(s0.N), sys.electrons->p);

    const auto distance = [&](const SystemState& a, const SystemState& b) {
        std::vector<double> df(a.f.size());
        for (std::size_t k = 0; k < df.size(); ++k) df[k] = a.f[k] - b.f[k];
        double dn = 0.0;
        for (std::size_t q = 0; q < a.N.size(); ++q) dn += (a.N[q] - b.N[q]) * (a.N[q] - b.N[q]);
        return std::hypot(l2_norm(*sys.electrons, df) / l2_norm(*sys.electrons, s0.f),
                          std::sqrt(dn) / std::sqrt(static_cast<double>(a.N.size())));
    };

    std::string detail;
    bool pass = true;
    double n_change = 0.0;
    for (Scheme scheme : {Scheme::fully_explicit, Scheme::fully_implicit}) {
        std::vector<SystemState> sols;
        for (int level = 0; level < 5; ++level) {
            const std::size_t n = std::size_t{8} << level;
            SystemState s = s0;
            for (std::size_t k = 0; k < n; ++k) s = step(*sys.op, s, T / static_cast<double>(n), scheme);
            sols.push_back(std::move(s));
        }
        if (scheme == Scheme::fully_explicit)
            for (std::size_t q = 0; q < s0.N.size(); ++q)
                n_change = std::max(n_change, std::abs(sols.back().N[q] - s0.N[q]) / s0.N[q]);
        std::vector<double> diffs;
        for (std::size_t k = 0; k + 1 < sols.size(); ++k) diffs.push_back(distance(sols[k], sols[k + 1]));
        detail += to_string(scheme) + " slopes";
        for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
            const double slope = std::log2(diffs[k] / diffs[k + 1]);
            pass = pass && slope >= 0.8 && slope <= 1.2;
            detail += fmt(" %.3f", slope);
        }
        detail += "; ";
    }
    detail += fmt("max relative change of N over T %.2e", n_change);
    return {pass, detail};
}

Outcome criterion_scaling() {
    std::vector<double> xs, ys;
    std::string detail = "per-step seconds:";
    for (std::size_t n : {8, 12, 16}) {
        RunConfig cfg;
        cfg.grid.n_p_par = cfg.grid.n_p_perp = n;
        cfg.grid.n_r = n;
        cfg.grid.n_q_phi = cfg.grid.n_kz = n;
        cfg.grid.n_tri_kr = cfg.grid.n_tri_r = n;
        cfg.grid.n_strata = n;
        const Scenario sc = build_scenario(cfg);
        SystemState s = initial_conditions(cfg, *sc.electrons, *sc.plasmons);
        const double dt = std::min(0.5 * dt_cfl(sc.op->diffusion_field(s.N), sc.electrons->p),
                                   0.5 * dt_positivity(*sc.op, s, 0.1));
        s = step(*sc.op, s, dt, Scheme::fully_explicit);  // warm-up
        std::size_t count = 0;
        const auto t0 = std::chrono::steady_clock::now();
        double elapsed = 0.0;
        while (count < 5 || elapsed < 0.5) {
            s = step(*sc.op, s, dt, Scheme::fully_explicit);
            ++count;
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        const double per_step = elapsed / static_cast<double>(count);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(per_step));
        detail += fmt(" n=%zu %.3e (%zu nnz)", n, per_step, sc.op->stats().nonzeros);
    }
    const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    const double slope = sxy / sxx;
    return {slope >= 2.5 && slope <= 10.0, detail + fmt("; log-log slope %.2f (predicted 5)", slope)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"conservation at desk scale", criterion_conservation},
        {"conservation for random kernels", criterion_kernel_independence},
        {"component labelling vs flood fill", criterion_component_oracle},
        {"proportions vs Monte Carlo", criterion_proportions},
        {"measure additivity", criterion_additivity},
        {"flow stays in its bundle", criterion_flow},
        {"positivity and L2 stability", criterion_positivity},
        {"discrete operator identities", criterion_operator_identities},
        {"temporal order", criterion_temporal_order},
        {"scaling of the step cost", criterion_scaling},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
