#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

namespace circmax {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// z1 * w2 - z2 * w1.
inline double wedge(const Vec2& z, const Vec2& w) { return z.x() * w.y() - z.y() * w.x(); }

inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Rotation by +90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// Axis-aligned rectangle in the plane.
struct Box2 {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    static Box2 square(const Vec2& center, double half_width) {
        return {center - Vec2(half_width, half_width), center + Vec2(half_width, half_width)};
    }

    bool contains(const Vec2& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
    }
    double width() const { return hi.x() - lo.x(); }
    double height() const { return hi.y() - lo.y(); }
    double area() const { return width() * height(); }
    Vec2 center() const { return 0.5 * (lo + hi); }
    bool empty() const { return !(hi.x() > lo.x() && hi.y() > lo.y()); }

    Box2 intersect(const Box2& o) const {
        return {lo.cwiseMax(o.lo), hi.cwiseMin(o.hi)};
    }
};

/// Wrap an angle into [-pi, pi).
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace circmax
