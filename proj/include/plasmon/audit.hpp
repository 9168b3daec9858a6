#pragma once

#include <cstddef>
#include <iosfwd>

#include "plasmon/bundles.hpp"
#include "plasmon/scenario.hpp"

namespace plasmon {

/// Cross-check of connected_components against the flood-fill oracle.
struct OracleComparison {
    std::size_t oracle_components = 0;
    std::size_t mesh_components = 0;
    std::size_t sampled_points = 0;
    std::size_t mismatched_points = 0;  // points whose oracle label maps to more than one component
    bool agree = false;
};

OracleComparison compare_with_oracle(const TriMesh& mesh, const PLHamiltonian& H, Interval I, std::size_t n);

/// |sum of all bundle measures - domain measure| / domain measure.
double measure_additivity_defect(const PlasmonSpace& space);

/// Oracle self-checks on a built plasmon space: component labelling on a
/// handful of (q_phi, k_z) cells, proportions against Monte Carlo and
/// measure additivity. Prints one line per check; returns true if all pass.
bool run_audit(const PlasmonSpace& space, std::ostream& log);

}  // namespace plasmon
