#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "plasmon/bundles.hpp"
#include "plasmon/ldg.hpp"
#include "plasmon/solver.hpp"

namespace plasmon {

/// Per-coefficient weights of the conserved quantities: mass M, momentum
/// M Pi p_z and energy M Pi E for electrons; G k_z and G omega for plasmons.
struct ConservedWeights {
    std::vector<double> mass;
    std::vector<double> momentum_f;
    std::vector<double> energy_f;
    std::vector<double> momentum_N;
    std::vector<double> energy_N;
};

ConservedWeights conserved_weights(const ElectronSpace& electrons, const PlasmonSpace& plasmons);

struct ConservationRecord {
    double t = 0.0;
    double mass = 0.0;
    double momentum_z = 0.0;
    double energy = 0.0;
    double e_rel_mass = 0.0;
    double e_rel_momentum = 0.0;
    double e_rel_energy = 0.0;
};

/// |q - q0| / max(|q0|, 1e-300)
double relative_error(double q, double q0);

ConservationRecord totals(const ConservedWeights& w, const SystemState& state);

/// Fills the relative errors of `rec` against `initial`.
void set_relative_errors(ConservationRecord& rec, const ConservationRecord& initial);

/// Writes the header `t,mass,momentum_z,energy,e_rel_mass,e_rel_momentum,e_rel_energy`.
void write_series_header(std::ostream& out);
void write_series_row(std::ostream& out, const ConservationRecord& rec);

/// Electron mass held in the last p_par column, where the momentum identity
/// has its boundary defect.
double last_column_mass(const ElectronSpace& electrons, const std::vector<double>& f);

/// Brute-force labelling of {sample points with H in I} on a (n+1) x (n+1)
/// lattice spanning the mesh rectangle. Two 8-neighbours are linked when the
/// straight segment between them stays inside H^{-1}(I).
struct FloodFillResult {
    std::size_t n = 0;
    std::size_t components = 0;
    std::vector<int> labels;  // (n+1)^2 entries, row-major in r, -1 outside the set

    Point2 point(const TriMesh& mesh, std::size_t a, std::size_t b) const;
};

FloodFillResult flood_fill_oracle(const TriMesh& mesh, const PLHamiltonian& H, Interval I, std::size_t n);

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Area of {H in I} inside one triangle with the given corner values.
MonteCarloEstimate monte_carlo_measure(const std::array<Point2, 3>& corners, const std::array<double, 3>& values,
                                       Interval I, std::size_t samples, std::uint64_t seed);

/// Area of {H in I} over the whole mesh rectangle.
MonteCarloEstimate monte_carlo_measure(const TriMesh& mesh, const PLHamiltonian& H, Interval I,
                                       std::size_t samples, std::uint64_t seed);

}  // namespace plasmon
