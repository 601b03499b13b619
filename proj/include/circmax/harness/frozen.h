#pragma once

#include "circmax/harness/config.h"

#include <filesystem>
#include <string>

namespace circmax::harness {

/// Constants pinned once by `calibrate` and read by every later run.
struct FrozenConstants {
    bool frozen = false;
    std::string corpus;
    /// Rectangle incidence constant and comparability factor.
    double C1 = 4.0;
    double C0 = 10.0;
    /// Overlap-area constant C*.
    double area_C = 0.0;
    /// Most incomparable rectangles incident to both curves of a tangent pair.
    double K_inc = 0.0;
    /// Constant of the bipartite census bound.
    double C_eps = 0.0;
    /// Constant of the forbidden-submatrix ones bound.
    double C_kst = 0.0;
    /// Constant of the per-cell crossing bound.
    double cutting_C = 0.0;
    /// Constant of the cell-count bound C N^3 log(N + 2).
    double cell_C = 0.0;
    /// Constant of the trivial maximal bound.
    double maximal_trivial_C = 0.0;
    /// Largest admissible flagged fraction is 1 - 1 / multiplicity_C.
    double multiplicity_C = 0.0;
    /// Cluster diameters are at most apollonius_C * t.
    double apollonius_C = 0.0;
    double C_surface = 4.0;
    double C_tangent = 4.0;

    Config to_config() const;
    static FrozenConstants from_config(const Config& c);
};

std::filesystem::path default_frozen_path();

/// Throws ConfigError when the table is not marked frozen or a constant is
/// not positive, IoError when unreadable.
FrozenConstants load_frozen(const std::filesystem::path& path = default_frozen_path());

void save_frozen(const FrozenConstants& k, const std::filesystem::path& path);

}  // namespace circmax::harness
