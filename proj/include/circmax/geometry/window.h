#pragma once

#include "circmax/common/types.h"

namespace circmax::geometry {

/// The disk B(b, alpha). An infinite radius stands for the whole plane.
class Window {
public:
    Window(Vec2 center, double radius, double shrink_factor = 0.5);

    static Window full_plane() { return Window(Vec2::Zero(), kInf, 0.5); }

    const Vec2& center() const { return center_; }
    double radius() const { return radius_; }
    double shrink_factor() const { return shrink_; }
    bool is_full_plane() const { return std::isinf(radius_); }

    /// Closed-disk membership.
    bool contains(const Vec2& y) const {
        return is_full_plane() || (y - center_).squaredNorm() <= radius_ * radius_;
    }

    /// B(b, shrink^levels * alpha). The full plane is its own shrink.
    Window shrunk(int levels = 1) const;

    /// Bounding box of the disk intersected with `clip`.
    Box2 bounding_box(const Box2& clip) const;

private:
    Vec2 center_;
    double radius_;
    double shrink_;
};

/// The default configuration: b = (0.95, 0), alpha = 0.25, shrink 1/2.
Window default_window();

}  // namespace circmax::geometry
