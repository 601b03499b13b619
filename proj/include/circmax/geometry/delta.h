#pragma once

#include "circmax/geometry/phi_circle.h"

namespace circmax::geometry {

/// Default coarse-grid spacing (arc length) for the Delta infimum.
inline constexpr double kDeltaResolution = 0.02;

/// Delta_X(g, h): the infimum over y on g and y~ on h, both in the closed
/// window, of |y - y~| + |unit normal difference|. Coarse grid at
/// `resolution`, then nested golden-section refinement of the best local
/// minima. Returns +inf when either curve misses the window. The routine is
/// symmetric in (g, h) bit for bit.
double delta(const PhiCircle& g, const PhiCircle& h, const Window& X,
             double resolution = kDeltaResolution);

/// ||x0 - x~0| - |r0 - r~0||, the full-plane Euclidean value.
double delta_closed_form(const PhiCircle& g, const PhiCircle& h);

/// Same value as delta(); for Euclidean Phi it returns the closed form when the
/// closed-form minimizing pair lies in the window, and otherwise falls back to
/// the numeric routine.
double delta_fast(const PhiCircle& g, const PhiCircle& h, const Window& X,
                  double resolution = kDeltaResolution);

/// A value never above delta(g, h, X) for any X: the closed form for
/// Euclidean Phi, zero otherwise.
double delta_lower_bound(const PhiCircle& g, const PhiCircle& h);

struct ParallelNormalOptions {
    /// Hypothesis: Delta over the shrunk window <= ratio * |x0 - x~0|.
    double hypothesis_ratio = 0.5;
    /// Arc-length spacing of the sign-change scan.
    double resolution = 1e-3;
};

/// The point xi of g inside X where grad_y Phi(x0, xi) and grad_y Phi(x~0, xi)
/// are parallel. Throws HypothesisError when the hypothesis ratio fails or no
/// sign change exists, NonUniqueError on more than one sign change.
Vec2 parallel_normal_point(const PhiCircle& g, const PhiCircle& h, const Window& X,
                           const ParallelNormalOptions& options = {});

}  // namespace circmax::geometry
