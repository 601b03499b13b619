#pragma once

#include "circmax/geometry/phi_circle.h"

#include <functional>
#include <optional>

namespace circmax::geometry {

/// Zero set of f on the regular (nx x ny)-cell grid over `box`, as polylines.
/// Saddle cells are resolved by the cell-center average.
CurveSample marching_squares(const std::function<double(const Vec2&)>& f, const Box2& box, int nx, int ny);

/// Same, from precomputed node values laid out row-major with (nx + 1) columns.
/// Cells with a non-finite corner are skipped.
CurveSample marching_squares(const std::vector<double>& values, const Box2& box, int nx, int ny);

/// Keeps only the parts of the curve inside X, splitting polylines where they leave it.
CurveSample clip_to_window(const CurveSample& curve, const Window& X);

/// Default grid spacing for conic extraction.
inline constexpr double kConicStep = 2e-3;

/// {y : Phi(x, y) + omega Phi(x~, y) = r} inside X, omega = +1 or -1.
/// An empty result means the level set misses X. When omega = +1 and r equals
/// min Phi(x, .) + Phi(x~, .) the result is the segment between the foci,
/// flagged degenerate.
CurveSample phi_conic(const DefiningFunction& phi, const Vec2& x, const Vec2& xt, int omega, double r,
                      const Window& X, double step = kConicStep);

struct IntersectionCount {
    int count = 0;
    /// The curves share a stretch rather than crossing at isolated points.
    bool non_transversal = false;
};

/// Number of clusters (merge radius tol) of segment crossings between the two curves.
IntersectionCount conic_intersection_count(const CurveSample& a, const CurveSample& b, double tol);

/// Distance from p to the segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Crossing point of segments [p0, p1] and [q0, q1], if any (endpoints included).
std::optional<Vec2> segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1);

}  // namespace circmax::geometry
