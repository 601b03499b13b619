#pragma once

#include "circmax/geometry/defining_function.h"
#include "circmax/geometry/window.h"

#include <iosfwd>
#include <memory>
#include <vector>

namespace circmax::geometry {

using PhiPtr = std::shared_ptr<const DefiningFunction>;

PhiPtr make_euclidean();

/// Admissible centers (U_1) and radii (1 - tau, 1).
struct ParameterDomain {
    Box2 centers = Box2::square(Vec2::Zero(), 0.1);
    double tau = 0.1;

    bool contains(const Vec2& x0, double r0) const {
        return centers.contains(x0) && r0 > 1.0 - tau && r0 < 1.0;
    }
};

/// Gamma(x0, r0) = {y : Phi(x0, y) = r0}, parametrized by the angle of y - x0.
class PhiCircle {
public:
    PhiCircle(PhiPtr phi, Vec2 x0, double r0);

    const Vec2& center() const { return x0_; }
    double radius() const { return r0_; }
    const DefiningFunction& phi() const { return *phi_; }
    const PhiPtr& phi_ptr() const { return phi_; }

    /// Distance from the center to the curve along direction theta.
    double rho(double theta) const;
    Vec2 point(double theta) const { return x0_ + rho(theta) * unit_vector(theta); }
    /// d point / d theta.
    Vec2 tangent(double theta) const;
    double speed(double theta) const { return tangent(theta).norm(); }
    /// grad_y Phi(x0, .) / |grad_y Phi(x0, .)| at point(theta).
    Vec2 unit_normal(double theta) const;
    Vec2 unit_normal_at(const Vec2& y) const { return phi_->grad_y(x0_, y).normalized(); }
    /// point(theta) and unit_normal(theta) together.
    std::pair<Vec2, Vec2> point_normal(double theta) const;

    /// Phi(x0, y) - r0 without domain checks.
    double level(const Vec2& y) const { return phi_->eval_unchecked(x0_, y) - r0_; }
    bool in_neighborhood(const Vec2& y, double delta) const { return std::abs(level(y)) <= delta; }

    /// Bounds of rho over all directions (exact for Euclidean Phi).
    double rho_min() const { return rho_min_; }
    double rho_max() const { return rho_max_; }

private:
    PhiPtr phi_;
    Vec2 x0_;
    double r0_;
    double rho_min_;
    double rho_max_;
};

/// Throws DomainError unless the circle's parameters lie in `domain`.
void check_domain(const PhiCircle& g, const ParameterDomain& domain);

/// |x0 - x~0| + |r0 - r~0|.
double metric_d(const PhiCircle& g, const PhiCircle& h);

/// Angles [lo, hi] with lo < hi; values are not wrapped.
struct AngleInterval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double theta) const;
};

/// Angle intervals of Gamma inside the closed window. Sorted; a full circle is
/// one interval of length 2 pi.
std::vector<AngleInterval> window_arcs(const PhiCircle& g, const Window& X);

struct Polyline {
    std::vector<Vec2> points;
    bool closed = false;
};

/// A sampled planar curve made of polylines.
struct CurveSample {
    std::vector<Polyline> pieces;
    double step = 0.0;
    bool degenerate = false;

    bool empty() const;
    std::size_t point_count() const;
};

/// Points of Gamma inside X with arc-length spacing at most `step`.
CurveSample sample_curve(const PhiCircle& g, const Window& X, double step);

/// Default sampling step for neighborhoods of width delta.
inline double default_step(double delta) { return std::min(delta / 4.0, 1e-3); }

/// CSV with header `y1,y2`; pieces are concatenated in order.
void write_csv(std::ostream& os, const CurveSample& curve);

}  // namespace circmax::geometry
