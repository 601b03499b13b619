#pragma once

#include "circmax/geometry/phi_circle.h"

#include <vector>

namespace circmax::tangency {

using geometry::PhiCircle;
using geometry::Window;

/// Default incidence constant C1.
inline constexpr double kDefaultC1 = 4.0;
/// Default comparability constant C0.
inline constexpr double kDefaultC0 = 10.0;
/// Rectangles need t >= kMinScaleRatio * delta.
inline constexpr double kMinScaleRatio = 4.0;

/// The delta-neighborhood {|Phi(x0, y) - r0| <= delta} of an arc of length
/// sqrt(delta / t) on a Phi-circle. The arc is addressed by the angle of its
/// midpoint around the base center.
class Rectangle {
public:
    Rectangle(PhiCircle base, double arc_center, double delta, double t);

    const PhiCircle& base() const { return base_; }
    double arc_center() const { return arc_center_; }
    double delta() const { return delta_; }
    double t() const { return t_; }
    double arc_length() const { return std::sqrt(delta_ / t_); }
    /// Angular half-width of the arc.
    double half_angle() const { return half_angle_; }

    /// Points of the rectangle: `n_arc` positions along the arc (ends included)
    /// times `n_offset` level offsets spread over [-delta, delta].
    std::vector<Vec2> samples(int n_arc = 9, int n_offset = 3) const;
    bool contains(const Vec2& y) const;
    Vec2 center_point() const { return base_.point(arc_center_); }

private:
    PhiCircle base_;
    double arc_center_;
    double delta_;
    double t_;
    double half_angle_;
};

/// Rectangle centered at angle `arc_center` of g. Throws PreconditionError
/// when t < min_ratio * delta and GeometryError when the arc leaves X.
Rectangle make_rect(const PhiCircle& g, double arc_center, double delta, double t, const Window& X,
                    double min_ratio = kMinScaleRatio);

/// Every sampled point of R satisfies |Phi(x0, y) - r0| <= C1 delta.
bool incident(const PhiCircle& g, const Rectangle& R, double C1 = kDefaultC1);

/// Both rectangles fit inside one (factor * delta, t)-rectangle built on the
/// base curve of either. Throws PreconditionError when (delta, t) differ.
bool contained_in_common(const Rectangle& R1, const Rectangle& R2, double factor);

/// Common (2 delta, t)-rectangle.
inline bool close(const Rectangle& R1, const Rectangle& R2) { return contained_in_common(R1, R2, 2.0); }
/// Common (C0 delta, t)-rectangle.
inline bool comparable(const Rectangle& R1, const Rectangle& R2, double C0 = kDefaultC0) {
    return contained_in_common(R1, R2, C0);
}

}  // namespace circmax::tangency
