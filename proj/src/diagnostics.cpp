#include "plasmon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <random>

#include "plasmon/numerics.hpp"

namespace plasmon {

ConservedWeights conserved_weights(const ElectronSpace& electrons, const PlasmonSpace& plasmons) {
    ConservedWeights w;
    const std::size_t np = electrons.num_p();
    const std::size_t n = electrons.size();
    w.mass.resize(n);
    w.momentum_f.resize(n);
    w.energy_f.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t c = k % np;
        w.mass[k] = electrons.mass_weight(k / np, c);
        w.momentum_f[k] = w.mass[k] * electrons.pz.values[c];
        w.energy_f[k] = w.mass[k] * electrons.energy.values[c];
    }
    const std::size_t nb = plasmons.bundles.size();
    w.momentum_N.resize(nb);
    w.energy_N.resize(nb);
    for (std::size_t q = 0; q < nb; ++q) {
        w.momentum_N[q] = plasmons.bundles[q].measure * plasmons.kz[q];
        w.energy_N[q] = plasmons.bundles[q].measure * plasmons.omega[q];
    }
    return w;
}

double relative_error(double q, double q0) { return std::abs(q - q0) / std::max(std::abs(q0), 1e-300); }

namespace {

double weighted_sum(const std::vector<double>& w, const std::vector<double>& x) {
    std::vector<double> terms(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) terms[k] = w[k] * x[k];
    return pairwise_sum(terms);
}

}  // namespace

ConservationRecord totals(const ConservedWeights& w, const SystemState& state) {
    ConservationRecord r;
    r.t = state.t;
    r.mass = weighted_sum(w.mass, state.f);
    r.momentum_z = weighted_sum(w.momentum_f, state.f) + weighted_sum(w.momentum_N, state.N);
    r.energy = weighted_sum(w.energy_f, state.f) + weighted_sum(w.energy_N, state.N);
    return r;
}

void set_relative_errors(ConservationRecord& rec, const ConservationRecord& initial) {
    rec.e_rel_mass = relative_error(rec.mass, initial.mass);
    rec.e_rel_momentum = relative_error(rec.momentum_z, initial.momentum_z);
    rec.e_rel_energy = relative_error(rec.energy, initial.energy);
}

void write_series_header(std::ostream& out) {
    out << "t,mass,momentum_z,energy,e_rel_mass,e_rel_momentum,e_rel_energy\n";
}

void write_series_row(std::ostream& out, const ConservationRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.6e,%.6e,%.6e\n", r.t, r.mass, r.momentum_z, r.energy,
                  r.e_rel_mass, r.e_rel_momentum, r.e_rel_energy);
    out << buf;
}

double last_column_mass(const ElectronSpace& electrons, const std::vector<double>& f) {
    const std::size_t np = electrons.num_p();
    const std::size_t J = electrons.p.n_perp();
    const std::size_t last = electrons.p.n_par() - 1;
    std::vector<double> terms;
    for (std::size_t xi = 0; xi < electrons.num_r(); ++xi)
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t c = last * J + j;
            terms.push_back(electrons.mass_weight(xi, c) * f[xi * np + c]);
        }
    return pairwise_sum(terms);
}

Point2 FloodFillResult::point(const TriMesh& mesh, std::size_t a, std::size_t b) const {
    const double u = static_cast<double>(a) / static_cast<double>(n);
    const double v = static_cast<double>(b) / static_cast<double>(n);
    return {a == n ? mesh.kr_grid.hi : mesh.kr_grid.lo + u * mesh.kr_grid.length(),
            b == n ? mesh.r_grid.hi : mesh.r_grid.lo + v * mesh.r_grid.length()};
}

namespace {

// True when the piecewise-linear H stays inside the open interval along the
// segment p -> q. H is linear between consecutive crossings of mesh lines
// (vertical, horizontal and diagonal), so checking those points suffices.
bool segment_inside(const TriMesh& mesh, const PLHamiltonian& H, Interval I, Point2 p, Point2 q) {
    const double dkr = mesh.kr_grid.length() / static_cast<double>(mesh.kr_grid.n);
    const double dr = mesh.r_grid.length() / static_cast<double>(mesh.r_grid.n);
    const double u0 = (p.kr - mesh.kr_grid.lo) / dkr, u1 = (q.kr - mesh.kr_grid.lo) / dkr;
    const double v0 = (p.r - mesh.r_grid.lo) / dr, v1 = (q.r - mesh.r_grid.lo) / dr;
    std::vector<double> params{0.0, 1.0};
    auto crossings = [&](double a0, double a1) {
        if (a0 == a1) return;
        const double lo = std::min(a0, a1), hi = std::max(a0, a1);
        for (double k = std::ceil(lo); k <= hi; k += 1.0) params.push_back((k - a0) / (a1 - a0));
    };
    crossings(u0, u1);
    crossings(v0, v1);
    crossings(u0 - v0, u1 - v1);
    for (double s : params) {
        s = std::clamp(s, 0.0, 1.0);
        const Point2 x{p.kr + s * (q.kr - p.kr), p.r + s * (q.r - p.r)};
        const double h = H.value_at(mesh, x);
        if (!(h > I.a && h < I.b)) return false;
    }
    return true;
}

}  // namespace

FloodFillResult flood_fill_oracle(const TriMesh& mesh, const PLHamiltonian& H, Interval I, std::size_t n) {
    FloodFillResult res;
    res.n = n;
    const std::size_t side = n + 1;
    res.labels.assign(side * side, -1);
    std::vector<char> inside(side * side, 0);
    for (std::size_t b = 0; b < side; ++b)
        for (std::size_t a = 0; a < side; ++a) {
            const double h = H.value_at(mesh, res.point(mesh, a, b));
            inside[b * side + a] = (h > I.a && h < I.b) ? 1 : 0;
        }

    int next_label = 0;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < side * side; ++start) {
        if (!inside[start] || res.labels[start] >= 0) continue;
        res.labels[start] = next_label;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            const long a = static_cast<long>(cur % side);
            const long b = static_cast<long>(cur / side);
            for (long db = -1; db <= 1; ++db)
                for (long da = -1; da <= 1; ++da) {
                    if (da == 0 && db == 0) continue;
                    const long na = a + da, nb = b + db;
                    if (na < 0 || nb < 0 || na >= static_cast<long>(side) || nb >= static_cast<long>(side)) continue;
                    const std::size_t nxt = static_cast<std::size_t>(nb) * side + static_cast<std::size_t>(na);
                    if (!inside[nxt] || res.labels[nxt] >= 0) continue;
                    if (!segment_inside(mesh, H, I, res.point(mesh, a, b),
                                        res.point(mesh, static_cast<std::size_t>(na), static_cast<std::size_t>(nb))))
                        continue;
                    res.labels[nxt] = next_label;
                    queue.push_back(nxt);
                }
        }
        ++next_label;
    }
    res.components = static_cast<std::size_t>(next_label);
    return res;
}

MonteCarloEstimate monte_carlo_measure(const std::array<Point2, 3>& c, const std::array<double, 3>& h, Interval I,
                                       std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        double u = uni(rng), v = uni(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const double val = (1.0 - u - v) * h[0] + u * h[1] + v * h[2];
        if (val > I.a && val < I.b) ++hits;
    }
    const double area =
        0.5 * std::abs((c[1].kr - c[0].kr) * (c[2].r - c[0].r) - (c[2].kr - c[0].kr) * (c[1].r - c[0].r));
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {area * p, area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

MonteCarloEstimate monte_carlo_measure(const TriMesh& mesh, const PLHamiltonian& H, Interval I,
                                       std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ukr(mesh.kr_grid.lo, mesh.kr_grid.hi);
    std::uniform_real_distribution<double> ur(mesh.r_grid.lo, mesh.r_grid.hi);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double val = H.value_at(mesh, {ukr(rng), ur(rng)});
        if (val > I.a && val < I.b) ++hits;
    }
    const double area = mesh.kr_grid.length() * mesh.r_grid.length();
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {area * p, area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace plasmon
