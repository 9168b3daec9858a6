#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "plasmon/bundles.hpp"
#include "plasmon/ldg.hpp"
#include "plasmon/solver.hpp"

namespace plasmon {

struct SnapshotManifest {
    std::string config_hash;
    std::size_t step = 0;
    double t = 0.0;
};

/// Writes dir/f.csv (xi,i,j,r_c,p_par_c,p_perp_c,value), dir/N.csv
/// (id,phz_cell,interval,measure,value) and dir/manifest.txt. Values are
/// printed with 17 significant digits so a read-back is exact.
void write_snapshot(const std::filesystem::path& dir, const SystemState& state, const ElectronSpace& electrons,
                    const PlasmonSpace& plasmons, const std::string& config_hash);

/// Reads a snapshot written for the same spaces. Throws IoError on missing
/// files or a shape mismatch.
SystemState read_snapshot(const std::filesystem::path& dir, const ElectronSpace& electrons,
                          const PlasmonSpace& plasmons, SnapshotManifest* manifest = nullptr);

}  // namespace plasmon
