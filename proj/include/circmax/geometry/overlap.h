#pragma once

#include "circmax/common/random.h"
#include "circmax/geometry/phi_circle.h"

#include <optional>

namespace circmax::geometry {

struct AreaEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t hits = 0;
    std::size_t samples = 0;
};

/// A region known to contain the delta-neighborhood of g inside X: a polar
/// sector of an annulus around g's center. Sampling it is uniform.
struct SectorRing {
    Vec2 center;
    double r_inner = 0.0;
    double r_outer = 0.0;
    double theta_lo = -kPi;
    double theta_hi = kPi;

    double area() const { return 0.5 * (theta_hi - theta_lo) * (r_outer * r_outer - r_inner * r_inner); }
    bool contains(const Vec2& y) const;
    Vec2 sample(Rng& rng) const;
};

/// Polar sector ring enclosing {|Phi(x0, y) - r0| <= delta} inside X.
SectorRing enclosing_ring(const PhiCircle& g, double delta, const Window& X);

/// Monte Carlo estimate of |g^delta  h^delta  X| (membership |Phi(x0, y) - r0| <= delta).
AreaEstimate annulus_overlap_area(const PhiCircle& g, const PhiCircle& h, double delta, const Window& X,
                                  std::size_t n_samples, Rng& rng);

/// Largest distance between grid points (spacing delta / 2) lying in
/// g^delta, h^delta and X. Returns 0 for an empty intersection.
double overlap_diameter(const PhiCircle& g, const PhiCircle& h, double delta, const Window& X);

/// Grid points (spacing `step`) in g^delta  h^delta  X, reduced to the
/// leftmost and rightmost point of every grid row.
std::vector<Vec2> overlap_row_extremes(const PhiCircle& g, const PhiCircle& h, double delta,
                                       const Window& X, double step);

/// Max pairwise distance of a point set (convex hull, then all hull pairs).
double point_set_diameter(std::vector<Vec2> points);

std::vector<Vec2> convex_hull(std::vector<Vec2> points);

}  // namespace circmax::geometry
