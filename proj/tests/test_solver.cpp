#include <doctest.h>

#include <cmath>
#include <limits>

#include "plasmon/diagnostics.hpp"
#include "plasmon/errors.hpp"
#include "plasmon/solver.hpp"
#include "support.hpp"

using namespace plasmon;
using plasmon::testing::Gen;

namespace {

SystemState random_state(const plasmon::testing::TinySystem& sys, Gen& gen, double n_scale = 1.0) {
    SystemState s;
    s.f.resize(sys.electrons->size());
    s.N.resize(sys.op->num_bundles());
    for (double& v : s.f) v = gen.uniform(0.0, 1.0);
    for (double& v : s.N) v = n_scale * gen.uniform(0.0, 1.0);
    return s;
}

const Scheme kAll[] = {Scheme::fully_explicit, Scheme::semi_implicit_f, Scheme::semi_implicit_N,
                       Scheme::fully_implicit};

}  // namespace

TEST_CASE("scheme names round-trip") {
    for (Scheme s : kAll) CHECK(parse_scheme(to_string(s)) == s);
    CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
}

TEST_CASE("positivity bound") {
    CHECK(std::isinf(dt_positivity(std::vector<double>{0.0, 1.0, 3.0}, 0.1)));
    const double dt = dt_positivity(std::vector<double>{-2.0}, 0.2);
    CHECK(dt == 0.4);
    CHECK(1.0 + dt * -2.0 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(dt_positivity(std::vector<double>{-1.0, 4.0}, 0.5, true) == 0.125);
}

TEST_CASE("explicit steps at the positivity bound keep N above delta times N") {
    Gen gen(40);
    const auto sys = plasmon::testing::make_tiny_system();
    const double delta = 0.1;
    int binding = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SystemState s = random_state(sys, gen);
        const double dt = 0.99 * dt_positivity(*sys.op, s, delta);
        if (!std::isfinite(dt)) continue;
        ++binding;
        const SystemState next = step(*sys.op, s, dt, Scheme::fully_explicit);
        for (std::size_t q = 0; q < s.N.size(); ++q) CHECK(next.N[q] >= delta * s.N[q]);
    }
    CHECK(binding > 50);
}

TEST_CASE("CFL bound") {
    const PGrid unit{build_rect_grid(0, 3, 3), build_rect_grid(0, 3, 3)};
    CHECK(std::isinf(dt_cfl(std::vector<std::array<double, 3>>(9, {0.0, 0.0, 0.0}), unit)));
    CHECK(dt_cfl(std::vector<std::array<double, 3>>(9, {1.0, 0.0, 1.0}), unit) == doctest::Approx(0.1125));
}

TEST_CASE("explicit step at the CFL bound does not increase the L2 norm") {
    Gen gen(41);
    const auto sys = plasmon::testing::make_tiny_system();
    for (int trial = 0; trial < 50; ++trial) {
        SystemState s = random_state(sys, gen, std::pow(10.0, gen.uniform(-3, 3)));
        const double dt = dt_cfl(sys.op->diffusion_field(s.N), sys.electrons->p);
        REQUIRE(std::isfinite(dt));
        // Hold N fixed so only the diffusion acts.
        SystemState next = s;
        std::vector<double> rate;
        sys.op->f_rate(s.N, s.f, rate);
        for (std::size_t k = 0; k < rate.size(); ++k) next.f[k] += dt * rate[k];
        CHECK(l2_norm(*sys.electrons, next.f) <= l2_norm(*sys.electrons, s.f) * (1.0 + 1e-14));
    }
}

TEST_CASE("empty interaction leaves the state unchanged") {
    auto cfg = plasmon::testing::tiny_config();
    KernelSpec spec = make_kernel(cfg);
    spec.amplitude = [](double, double, double, double, double, double) { return 0.0; };
    const auto sys = plasmon::testing::make_tiny_system(cfg, spec);
    Gen gen(1);
    const SystemState s = random_state(sys, gen);
    for (Scheme sc : kAll) {
        const SystemState next = step(*sys.op, s, 0.7, sc);
        CHECK(next.f == s.f);
        CHECK(next.N == s.N);
        CHECK(next.t == 0.7);
    }
}

TEST_CASE("every scheme conserves mass and energy") {
    Gen gen(42);
    const auto sys = plasmon::testing::make_tiny_system();
    for (Scheme sc : kAll) {
        SystemState s = initial_conditions(sys.config, *sys.electrons, *sys.plasmons);
        const auto t0 = totals(sys.weights, s);
        for (int k = 0; k < 20; ++k) {
            const double dt = 0.5 * std::min(dt_cfl(sys.op->diffusion_field(s.N), sys.electrons->p),
                                             dt_positivity(*sys.op, s, 0.1, sc == Scheme::semi_implicit_N ||
                                                                                 sc == Scheme::fully_implicit));
            StepInfo info;
            s = step(*sys.op, s, dt, sc, &info);
            if (sc == Scheme::semi_implicit_f || sc == Scheme::fully_implicit) CHECK(info.linear_residual <= 1e-12);
        }
        const auto t1 = totals(sys.weights, s);
        CHECK(relative_error(t1.mass, t0.mass) <= 1e-13);
        CHECK(relative_error(t1.energy, t0.energy) <= 1e-13);
    }
}

TEST_CASE("semi-implicit diffusion is L2 stable beyond the CFL bound") {
    auto cfg = plasmon::testing::tiny_config();
    cfg.initial.n_amplitude = 1.0;
    const auto sys = plasmon::testing::make_tiny_system(cfg);
    SystemState s = initial_conditions(cfg, *sys.electrons, *sys.plasmons);
    for (int k = 0; k < 30; ++k) {
        const double dt = 10.0 * dt_cfl(sys.op->diffusion_field(s.N), sys.electrons->p);
        const double before = l2_norm(*sys.electrons, s.f);
        s = step(*sys.op, s, std::min(dt, 0.9 * dt_positivity(*sys.op, s, 0.1)), Scheme::semi_implicit_f);
        CHECK(l2_norm(*sys.electrons, s.f) <= before * (1.0 + 1e-14));
    }
}

TEST_CASE("fully implicit iteration converges and reports its work") {
    auto cfg = plasmon::testing::tiny_config();
    cfg.initial.n_amplitude = 0.1;
    const auto sys = plasmon::testing::make_tiny_system(cfg);
    const SystemState s = initial_conditions(cfg, *sys.electrons, *sys.plasmons);
    StepInfo info;
    const double dt = 2.0 * dt_cfl(sys.op->diffusion_field(s.N), sys.electrons->p);
    const SystemState next = step(*sys.op, s, dt, Scheme::fully_implicit, &info);
    CHECK(info.fixed_point_iterations >= 2);
    CHECK(info.fixed_point_iterations <= 50);
    for (double v : next.N) CHECK(v >= 0.0);
}

TEST_CASE("negative plasmon coefficients are a step failure") {
    const auto sys = plasmon::testing::make_tiny_system();
    Gen gen(3);
    SystemState s = random_state(sys, gen);
    const double dt = dt_positivity(*sys.op, s, 0.1);
    REQUIRE(std::isfinite(dt));
    CHECK_THROWS_AS(step(*sys.op, s, 100.0 * dt, Scheme::fully_explicit), StepFailure);
    s.f[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step(*sys.op, s, 1e-12, Scheme::fully_explicit), StepFailure);
}

TEST_CASE("run with zero end time reports only the initial state") {
    const auto sys = plasmon::testing::make_tiny_system();
    const SystemState s = initial_conditions(sys.config, *sys.electrons, *sys.plasmons);
    RunOptions opts;
    opts.t_max = 0.0;
    int calls = 0;
    const auto out = run(*sys.op, s, opts, [&](const SystemState&, const StepRecord& r) {
        ++calls;
        CHECK(r.step == 0);
    });
    CHECK(calls == 1);
    CHECK(out.f == s.f);
}

TEST_CASE("adaptive run is deterministic, positive and lands on t_max") {
    auto cfg = plasmon::testing::tiny_config();
    const auto sys = plasmon::testing::make_tiny_system(cfg);
    const SystemState s = initial_conditions(cfg, *sys.electrons, *sys.plasmons);
    RunOptions opts;
    opts.t_max = 50.0 * dt_cfl(sys.op->diffusion_field(s.N), sys.electrons->p);
    for (Scheme sc : kAll) {
        opts.scheme = sc;
        double min_n = INFINITY;
        const auto a = run(*sys.op, s, opts, [&](const SystemState& st, const StepRecord&) {
            for (double v : st.N) min_n = std::min(min_n, v);
        });
        const auto b = run(*sys.op, s, opts);
        CHECK(a.f == b.f);
        CHECK(a.N == b.N);
        CHECK(a.t == opts.t_max);
        CHECK(min_n >= 0.0);
    }
}

TEST_CASE("run validates its options") {
    const auto sys = plasmon::testing::make_tiny_system();
    const SystemState s = initial_conditions(sys.config, *sys.electrons, *sys.plasmons);
    RunOptions opts;
    opts.delta = 1.5;
    CHECK_THROWS_AS(run(*sys.op, s, opts), ConfigError);
}
