#include "plasmon/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include "plasmon/diagnostics.hpp"
#include "plasmon/numerics.hpp"

namespace plasmon {

OracleComparison compare_with_oracle(const TriMesh& mesh, const PLHamiltonian& H, Interval I, std::size_t n) {
    OracleComparison cmp;
    const auto comps = connected_components(connection_matrix(mesh, H, I));
    cmp.mesh_components = comps.size();
    std::vector<long> comp_of(mesh.num_triangles(), -1);
    for (std::size_t k = 0; k < comps.size(); ++k)
        for (std::size_t t : comps[k]) comp_of[t] = static_cast<long>(k);

    const FloodFillResult oracle = flood_fill_oracle(mesh, H, I, n);
    cmp.oracle_components = oracle.components;
    std::map<int, long> label_to_comp;
    std::map<long, int> comp_to_label;
    const std::size_t side = n + 1;
    for (std::size_t b = 0; b < side; ++b)
        for (std::size_t a = 0; a < side; ++a) {
            const int label = oracle.labels[b * side + a];
            if (label < 0) continue;
            ++cmp.sampled_points;
            const long comp = comp_of[mesh.locate(oracle.point(mesh, a, b))];
            const auto [it, fresh] = label_to_comp.emplace(label, comp);
            const auto [jt, fresh2] = comp_to_label.emplace(comp, label);
            if (comp < 0 || it->second != comp || jt->second != label) ++cmp.mismatched_points;
        }
    cmp.agree = cmp.mismatched_points == 0 && cmp.oracle_components == cmp.mesh_components &&
                label_to_comp.size() == cmp.mesh_components;
    return cmp;
}

double measure_additivity_defect(const PlasmonSpace& space) {
    std::vector<double> parts;
    for (const auto& b : space.bundles) parts.push_back(b.measure);
    for (const auto& b : space.excluded) parts.push_back(b.measure);
    const double total = space.total_measure();
    return std::abs(pairwise_sum(parts) - total) / total;
}

bool run_audit(const PlasmonSpace& space, std::ostream& log) {
    bool ok = true;
    char buf[256];
    const std::size_t cells = space.num_phz_cells();
    const std::size_t picks[] = {0, cells / 3, (2 * cells) / 3, cells - 1};
    for (std::size_t cell : picks) {
        const auto& H = space.hamiltonians[cell];
        const auto& strat = space.strata[cell];
        for (std::size_t j = 0; j < strat.num_intervals(); ++j) {
            const Interval I{strat.levels[j], strat.levels[j + 1]};
            const auto cmp = compare_with_oracle(space.mesh, H, I, 400);
            ok = ok && cmp.agree;
            std::snprintf(buf, sizeof buf, "%s components cell=%zu interval=%zu oracle=%zu mesh=%zu mismatched=%zu\n",
                          cmp.agree ? "PASS" : "FAIL", cell, j, cmp.oracle_components, cmp.mesh_components,
                          cmp.mismatched_points);
            log << buf;
        }
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t worst_trial = 0;
    double worst_z = 0.0;
    for (std::size_t trial = 0; trial < 50; ++trial) {
        const std::array<Point2, 3> c{Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{unit(rng), 0.2 + unit(rng)}};
        const std::array<double, 3> h{unit(rng), unit(rng), unit(rng)};
        double a = unit(rng), b = unit(rng);
        if (a > b) std::swap(a, b);
        const Interval I{a, b};
        const auto mc = monte_carlo_measure(c, h, I, 200000, 1000 + trial);
        const double area = 0.5 * std::abs((c[1].kr - c[0].kr) * (c[2].r - c[0].r) - (c[2].kr - c[0].kr) * (c[1].r - c[0].r));
        const double exact = triangle_proportion(h, I) * area;
        const double p = exact / area;
        const double se = area * std::sqrt(std::max(p * (1.0 - p), 1e-300) / 200000.0);
        const double z = std::abs(mc.value - exact) / se;
        if (z > worst_z) {
            worst_z = z;
            worst_trial = trial;
        }
    }
    const bool mc_ok = worst_z <= 4.0;
    ok = ok && mc_ok;
    std::snprintf(buf, sizeof buf, "%s proportions vs monte carlo: worst |z| = %.3f (trial %zu)\n",
                  mc_ok ? "PASS" : "FAIL", worst_z, worst_trial);
    log << buf;

    const double defect = measure_additivity_defect(space);
    const bool add_ok = defect <= 1e-10;
    ok = ok && add_ok;
    std::snprintf(buf, sizeof buf, "%s measure additivity: relative defect %.3e\n", add_ok ? "PASS" : "FAIL", defect);
    log << buf;
    return ok;
}

}  // namespace plasmon
