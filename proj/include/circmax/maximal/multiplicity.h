#pragma once

#include "circmax/geometry/window.h"
#include "circmax/maximal/maximal.h"

#include <vector>

namespace circmax::maximal {

using geometry::Window;

struct MultiplicityOptions {
    /// Radii must lie in (1 - tau, 1).
    double tau = 0.1;
    /// Counting pixels per delta.
    int cells_per_delta = 2;
};

struct MultiplicityReport {
    /// delta^-eta lambda^-2.
    double threshold = 0.0;
    /// Per circle: |X cap {y in Gamma^delta : count(y) > threshold}|.
    std::vector<double> heavy_area;
    /// Per circle: |Gamma^delta| on the same lattice.
    std::vector<double> annulus_area;
    std::vector<char> flagged;
    /// Largest value of the counting function inside X.
    int max_count = 0;

    std::size_t flagged_count() const;
    double flagged_fraction() const;
};

/// Counts the delta-annuli of A over a pixel lattice covering X and flags
/// each circle whose heavy part inside X exceeds lambda |Gamma^delta|.
/// Throws SeparationError when two radii are closer than delta, and
/// PreconditionError unless delta < lambda < 1, eta > 0 and every radius
/// lies in (1 - tau, 1). A full-plane X uses the bounding box of the annuli.
MultiplicityReport multiplicity_check(const std::vector<PhiCircle>& A, double delta, double eta, double lambda,
                                      const Window& X, const MultiplicityOptions& options = {});

/// Circles with centers uniform in U_1 and distinct radii drawn from the
/// lattice 1 - k * spacing, k = 1, 2, ..., inside (1 - tau, 1).
std::vector<PhiCircle> separated_circles(Rng& rng, int count, double spacing, double tau, const PhiPtr& phi);

}  // namespace circmax::maximal
