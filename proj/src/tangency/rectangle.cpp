#include "circmax/tangency/rectangle.h"

#include "circmax/common/error.h"

#include <algorithm>

namespace circmax::tangency {

Rectangle::Rectangle(PhiCircle base, double arc_center, double delta, double t)
    : base_(std::move(base)), arc_center_(arc_center), delta_(delta), t_(t) {
    if (!(delta > 0.0) || !(t >= delta)) throw PreconditionError("rectangle needs t >= delta > 0");
    half_angle_ = 0.5 * arc_length() / base_.speed(arc_center);
}

std::vector<Vec2> Rectangle::samples(int n_arc, int n_offset) const {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n_arc) * n_offset);
    for (int k = 0; k < n_arc; ++k) {
        const double th = arc_center_ + half_angle_ * (n_arc == 1 ? 0.0 : 2.0 * k / (n_arc - 1) - 1.0);
        const Vec2 p = base_.point(th);
        // Offset along the gradient so the level changes by the requested amount.
        const Vec2 g = base_.phi().grad_y(base_.center(), p);
        const Vec2 step = g / g.squaredNorm();
        for (int j = 0; j < n_offset; ++j) {
            const double o = n_offset == 1 ? 0.0 : delta_ * (2.0 * j / (n_offset - 1) - 1.0);
            out.push_back(p + o * step);
        }
    }
    return out;
}

bool Rectangle::contains(const Vec2& y) const {
    if (std::abs(base_.level(y)) > delta_) return false;
    const Vec2 d = y - base_.center();
    return std::abs(wrap_angle(std::atan2(d.y(), d.x()) - arc_center_)) <= half_angle_;
}

Rectangle make_rect(const PhiCircle& g, double arc_center, double delta, double t, const Window& X,
                    double min_ratio) {
    if (!(delta > 0.0) || t < min_ratio * delta)
        throw PreconditionError("rectangle needs t >= " + std::to_string(min_ratio) + " delta");
    Rectangle R(g, arc_center, delta, t);
    if (!X.is_full_plane()) {
        for (const auto& arc : geometry::window_arcs(g, X)) {
            if (arc.contains(arc_center - R.half_angle()) && arc.contains(arc_center + R.half_angle()) &&
                arc.contains(arc_center))
                return R;
        }
        throw GeometryError("rectangle arc leaves the window");
    }
    return R;
}

bool incident(const PhiCircle& g, const Rectangle& R, double C1) {
    const double tol = C1 * R.delta();
    // Cheap rejection at the center before the full sample.
    if (std::abs(g.level(R.center_point())) > tol + R.delta()) return false;
    for (const auto& y : R.samples())
        if (std::abs(g.level(y)) > tol) return false;
    return true;
}

namespace {

/// Whether the samples fit in the (factor delta, t)-rectangle on `base`
/// whose arc is positioned to cover their angular span.
bool fits_on(const PhiCircle& base, const std::vector<Vec2>& pts, double delta, double t, double factor,
             double reference_angle) {
    const double width = factor * delta * (1.0 + 1e-12);
    double lo = kInf, hi = -kInf;
    for (const auto& y : pts) {
        if (std::abs(base.level(y)) > width) return false;
        const Vec2 d = y - base.center();
        const double a = wrap_angle(std::atan2(d.y(), d.x()) - reference_angle);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const double mid = reference_angle + 0.5 * (lo + hi);
    const double allowed = std::sqrt(factor * delta / t) / base.speed(mid);
    return (hi - lo) <= allowed * (1.0 + 1e-12);
}

}  // namespace

bool contained_in_common(const Rectangle& R1, const Rectangle& R2, double factor) {
    if (R1.delta() != R2.delta() || R1.t() != R2.t())
        throw PreconditionError("rectangle relations need equal (delta, t)");
    std::vector<Vec2> pts = R1.samples();
    const auto more = R2.samples();
    pts.insert(pts.end(), more.begin(), more.end());
    return fits_on(R1.base(), pts, R1.delta(), R1.t(), factor, R1.arc_center()) ||
           fits_on(R2.base(), pts, R2.delta(), R2.t(), factor, R2.arc_center());
}

}  // namespace circmax::tangency
