#include "circmax/geometry/window.h"

#include "circmax/common/error.h"

#include <cmath>

namespace circmax::geometry {

Window::Window(Vec2 center, double radius, double shrink_factor)
    : center_(std::move(center)), radius_(radius), shrink_(shrink_factor) {
    if (!(radius > 0.0)) throw DomainError("window radius must be positive");
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0))
        throw DomainError("window shrink factor must lie in (0, 1)");
    if (!center_.allFinite()) throw DomainError("window center must be finite");
}

Window Window::shrunk(int levels) const {
    if (is_full_plane()) return *this;
    return Window(center_, radius_ * std::pow(shrink_, levels), shrink_);
}

Box2 Window::bounding_box(const Box2& clip) const {
    if (is_full_plane()) return clip;
    return Box2::square(center_, radius_).intersect(clip);
}

Window default_window() { return Window(Vec2(0.95, 0.0), 0.25, 0.5); }

}  // namespace circmax::geometry
