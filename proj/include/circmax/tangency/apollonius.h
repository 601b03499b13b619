#pragma once

#include "circmax/common/random.h"
#include "circmax/geometry/phi_circle.h"
#include "circmax/tangency/rectangle.h"

#include <array>
#include <vector>

namespace circmax::tangency {

struct ProbeOptions {
    double C1 = kDefaultC1;
    /// Separation constant for the three tangency regions, in units of sqrt(delta/t).
    double C3 = 0.1;
    double min_ratio = kMinScaleRatio;
    /// Single-linkage radius in units of t (metric d).
    double linkage = 1.0;
    geometry::ParameterDomain domain{};
    /// Fewer survivors than this sets `insufficient`.
    std::size_t min_survivors = 10;
};

/// A candidate circle as (x0_1, x0_2, r0).
using CircleParams = std::array<double, 3>;

struct ProbeResult {
    std::vector<CircleParams> survivors;
    std::vector<std::vector<int>> clusters;
    /// Diameter (metric d) of each cluster, in cluster order.
    std::vector<double> diameters;
    std::size_t candidates = 0;
    bool insufficient = false;
};

/// Points of g^wg  h^wh  B, sampled along g every `arc_step` and across
/// its level sets every `level_step`.
std::vector<Vec2> neighborhood_overlap(const PhiCircle& g, double wg, const PhiCircle& h, double wh,
                                       const Window& B, double level_step, double arc_step);

/// Whether the circle (x, r) satisfies all four clauses of the Y-set for the
/// triple. Delta uses X.shrunk(1), the overlap clauses B0 = X.shrunk(2).
bool in_y_set(const PhiCircle& c, const std::array<PhiCircle, 3>& triple, double t, double delta, const Window& X,
              const ProbeOptions& options = {});

/// Rejection sampling of the Y-set. For Euclidean Phi a uniform center is
/// moved by Newton steps onto a circle tangent to all three (random tangency
/// signs), then jittered in (x, r) by a uniform ball whose radius is
/// log-uniform in [C1 delta, t]. Otherwise centers and radii are uniform in
/// the domain. Survivors
/// are clustered by single linkage at radius linkage * t. Throws
/// PreconditionError when the triple is closer than t in d or t <= min_ratio * delta.
ProbeResult appolonius_probe(const std::array<PhiCircle, 3>& triple, double t, double delta, const Window& X,
                             std::size_t n_candidates, Rng& rng, const ProbeOptions& options = {});

/// Single-linkage clusters of points under metric d at the given radius.
std::vector<std::vector<int>> single_linkage(const std::vector<CircleParams>& pts, double radius);

double params_distance(const CircleParams& a, const CircleParams& b);

}  // namespace circmax::tangency
