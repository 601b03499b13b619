#pragma once

#include "circmax/arrangement/surface.h"
#include "circmax/geometry/phi_circle.h"

#include <vector>

namespace circmax::arrangement {

/// Part of S1  S2 lying on one pair of sheets, projected to x, with the
/// common height r at every sample.
struct TaggedCurve {
    Sheet first = Sheet::lower;
    Sheet second = Sheet::lower;
    geometry::CurveSample curve;
    /// r[i][k] is the height above curve.pieces[i].points[k].
    std::vector<std::vector<double>> r;
};

/// Marching extraction of S1  S2 over `region` on an n x n grid, one entry
/// per sheet pair that meets. Empty for disjoint surfaces. Throws
/// PreconditionError when the two surfaces share an apex.
std::vector<TaggedCurve> intersection_curve(const TangencySurface& S1, const TangencySurface& S2,
                                            const Box2& region = geometry::ParameterDomain{}.centers, int n = 400);

struct ExtremalPoints {
    std::vector<Vec2> points;
    /// Some piece is a segment parallel to the x2 axis; it contributes no points.
    bool vertical_segment = false;
};

/// Points where x1 has a local extremum along the curve (sign change of the
/// first tangent component), merged within `merge_radius` (default: four
/// grid steps of the sample). Throws PreconditionError for an empty curve.
ExtremalPoints extremal_points(const geometry::CurveSample& curve, double merge_radius = 0.0);

}  // namespace circmax::arrangement
