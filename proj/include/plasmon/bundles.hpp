#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "plasmon/geometry.hpp"
#include "plasmon/hamiltonian.hpp"
#include "plasmon/mesh.hpp"

namespace plasmon {

/// Open value interval (a, b) of the Hamiltonian.
struct Interval {
    double a = 0.0;
    double b = 0.0;
    bool intersects_closed(double lo, double hi) const { return lo < b && hi > a; }
};

/// Sparse symmetric adjacency of triangles whose closures meet inside H^{-1}(I).
struct ConnectionMatrix {
    std::vector<char> active;                      // diagonal entries
    std::vector<std::vector<std::size_t>> links;   // off-diagonal entries, sorted
};

ConnectionMatrix connection_matrix(const TriMesh& mesh, const PLHamiltonian& H, Interval I);

/// Connected components of the active triangles, each sorted, ordered by
/// their smallest triangle id.
std::vector<std::vector<std::size_t>> connected_components(const ConnectionMatrix& A);

/// Fraction of a triangle where the P1 interpolant of `values` exceeds `level`.
double fraction_above(std::array<double, 3> values, double level);

/// Fraction of a triangle where the P1 interpolant lies in I.
double triangle_proportion(std::array<double, 3> values, Interval I);

std::vector<double> proportions(const TriMesh& mesh, const PLHamiltonian& H, Interval I,
                                const std::vector<std::size_t>& cover);

struct TrajectoryBundle {
    std::size_t id = 0;
    std::size_t phz_cell = 0;
    std::size_t interval = 0;
    double h_a = 0.0;
    double h_b = 0.0;
    std::vector<std::size_t> cover;
    std::vector<double> proportions;
    double measure = 0.0;
    bool touches_kr_boundary = false;
    // Representative wave data at the (q_phi, k_z) cell center.
    double q_phi = 0.0;
    double kz = 0.0;
};

struct BundleFamily {
    std::vector<TrajectoryBundle> retained;
    std::vector<TrajectoryBundle> excluded;  // cut off by the k_r boundary
};

/// Bundles of one (q_phi, k_z) cell for every interval of `strat`. Ids are
/// local (0-based within each list); build_plasmon_space renumbers them.
BundleFamily build_bundles(const TriMesh& mesh, const PLHamiltonian& H, const Stratification& strat,
                           std::size_t phz_cell, double phz_cell_area);

/// Polygon of triangle t where H lies in [a, b].
Polygon in_band_polygon(const TriMesh& mesh, const PLHamiltonian& H, std::size_t t, Interval I);

/// Sup-projection of g(k_r, q_phi, k_z, r) onto a bundle: maximum over the
/// corners and centroid of each in-band piece of the cover triangles, with
/// (q_phi, k_z) fixed at the cell center.
double project_onto_bundle(const std::function<double(double kr, double q_phi, double kz, double r)>& g,
                           const TrajectoryBundle& bundle, const TriMesh& mesh,
                           const PLHamiltonian& H);

/// Sup of the interpolated Hamiltonian itself over the bundle.
double project_hamiltonian(const TrajectoryBundle& bundle, const TriMesh& mesh, const PLHamiltonian& H);

/// Wave-vector space partitioned into (q_phi, k_z) cells, one interpolated
/// Hamiltonian and stratification per cell, and the resulting bundles.
struct PlasmonSpace {
    TriMesh mesh;
    RectGrid1D q_grid;
    RectGrid1D kz_grid;
    std::vector<PLHamiltonian> hamiltonians;  // one per phz cell
    std::vector<Stratification> strata;
    std::vector<TrajectoryBundle> bundles;    // retained, ids 0..n-1
    std::vector<TrajectoryBundle> excluded;   // ids continue after the retained ones
    std::vector<double> omega;                // sup-projection of the Hamiltonian per retained bundle
    std::vector<double> kz;                   // projection of k_z per retained bundle

    std::size_t num_phz_cells() const { return q_grid.n * kz_grid.n; }
    std::size_t phz_index(std::size_t iq, std::size_t ikz) const { return iq * kz_grid.n + ikz; }
    double phz_cell_area(std::size_t cell) const;
    double total_measure() const;  // domain measure in (k_r, r, q_phi, k_z)
};

PlasmonSpace build_plasmon_space(const DispersionModel& model, const TriMesh& mesh,
                                 const RectGrid1D& q_grid, const RectGrid1D& kz_grid, std::size_t n_strata);

/// Delimited dump: id,phz_cell,interval,h_a,h_b,cover_size,measure,retained
void write_bundle_table(std::ostream& out, const PlasmonSpace& space);

}  // namespace plasmon
