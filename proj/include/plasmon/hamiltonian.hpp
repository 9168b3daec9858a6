#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "plasmon/mesh.hpp"

namespace plasmon {

// Internal units: m_e = c = omega_0 = R_max = 1.

enum class DensityProfile { parabolic, uniform };

struct PlasmaParameters {
    DensityProfile profile = DensityProfile::parabolic;
    double omega_pe0 = 1.0;  // plasma frequency on the axis
    double omega_ce0 = 1.0;  // gyro-frequency of the uniform field B0
    double r_max = 1.0;
};

/// Plasmon Hamiltonian omega(k; omega_pe(r), omega_ce(r)). The profiles and
/// the branch are plug-in points; every caller treats the model as a pure
/// function and may evaluate it concurrently.
struct DispersionModel {
    std::function<double(double r)> omega_pe;
    std::function<double(double r)> omega_ce;
    /// Branch evaluator from the physical components (k_r, k_phi, k_z).
    std::function<double(double kr, double kphi, double kz, double wpe, double wce)> branch;
};

/// omega^2 = omega_pe(r)^2 + |k|^2 with the density profile of `params`.
DispersionModel make_default_model(const PlasmaParameters& params);

/// Evaluates omega at canonical coordinates (k_r, q_phi, k_z, r); k_phi = q_phi / r.
/// Throws DomainError for r <= 0 or a non-positive result.
double eval_dispersion(const DispersionModel& model, double kr, double q_phi, double kz, double r);

/// Continuous piecewise-linear Hamiltonian on a TriMesh for one (q_phi, k_z) cell.
struct PLHamiltonian {
    std::size_t phz_cell = 0;
    double q_phi = 0.0;
    double kz = 0.0;
    std::vector<double> node_values;
    double min_val = 0.0;
    double max_val = 0.0;

    std::array<double, 3> triangle_values(const TriMesh& mesh, std::size_t t) const;
    /// P1 interpolant evaluated inside triangle t (barycentric extension).
    double value_in(const TriMesh& mesh, std::size_t t, Point2 p) const;
    double value_at(const TriMesh& mesh, Point2 p) const;
    /// Constant gradient (dH/dk_r, dH/dr) on triangle t.
    Point2 gradient(const TriMesh& mesh, std::size_t t) const;
};

/// Builds a PLHamiltonian from prescribed node values.
PLHamiltonian make_pl_hamiltonian(std::vector<double> node_values, std::size_t phz_cell = 0,
                                  double q_phi = 0.0, double kz = 0.0);

/// Samples an arbitrary function of (k_r, r) at the mesh nodes.
PLHamiltonian sample_pl_hamiltonian(const TriMesh& mesh,
                                    const std::function<double(double kr, double r)>& fn);

/// Nodal interpolation of the dispersion relation at a fixed (q_phi, k_z).
/// Nodes on the axis r = 0, where k_phi is undefined, are sampled at half the
/// height of the first mesh row.
PLHamiltonian interpolate_hamiltonian(const DispersionModel& model, const TriMesh& mesh,
                                      double q_phi, double kz, std::size_t phz_cell = 0);

/// Levels H_0 <= H_1 < ... < H_n splitting the range of a PLHamiltonian.
struct Stratification {
    std::vector<double> levels;
    std::size_t num_intervals() const { return levels.empty() ? 0 : levels.size() - 1; }
};

/// Uniform split of [min_val, max_val] into n_s intervals. Interior levels that
/// coincide with a node value are pushed up by 1e-9 * range, doubling the push
/// until clear. Throws DegenerateFieldError for a constant Hamiltonian.
Stratification stratify(const PLHamiltonian& H, std::size_t n_s);

/// Exact flow of the Hamiltonian system dr/dt = dH/dk_r, dk_r/dt = -dH/dr
/// for a piecewise-linear H: straight segments inside each triangle, handed
/// over to the edge neighbour when a segment reaches an edge.
class PiecewiseLinearFlow {
public:
    PiecewiseLinearFlow(const TriMesh& mesh, const PLHamiltonian& H);

    struct State {
        Point2 position;
        std::size_t triangle = 0;
        bool left_domain = false;
    };

    State start(Point2 p) const;
    /// Advances the state by `duration`; stops early if the orbit leaves the mesh.
    State advance(State s, double duration) const;

    Point2 velocity(std::size_t t) const;

private:
    const TriMesh* mesh_;
    const PLHamiltonian* H_;
    double nudge_;
};

}  // namespace plasmon
