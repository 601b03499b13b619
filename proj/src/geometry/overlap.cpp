#include "circmax/geometry/overlap.h"

#include "circmax/common/error.h"

#include <algorithm>

namespace circmax::geometry {

bool SectorRing::contains(const Vec2& y) const {
    const Vec2 d = y - center;
    const double r2 = d.squaredNorm();
    if (r2 < r_inner * r_inner || r2 > r_outer * r_outer) return false;
    if (theta_hi - theta_lo >= 2.0 * kPi) return true;
    return AngleInterval{theta_lo, theta_hi}.contains(std::atan2(d.y(), d.x()));
}

Vec2 SectorRing::sample(Rng& rng) const {
    const double r = std::sqrt(uniform(rng, r_inner * r_inner, r_outer * r_outer));
    return center + r * unit_vector(uniform(rng, theta_lo, theta_hi));
}

SectorRing enclosing_ring(const PhiCircle& g, double delta, const Window& X) {
    SectorRing ring;
    ring.center = g.center();
    const double pad = g.phi().is_euclidean() ? delta : 2.0 * delta;
    ring.r_inner = std::max(0.0, g.rho_min() - pad);
    ring.r_outer = g.rho_max() + pad;
    if (!X.is_full_plane()) {
        const Vec2 to_b = X.center() - g.center();
        const double dist = to_b.norm();
        if (dist > X.radius()) {
            const double phi = std::atan2(to_b.y(), to_b.x());
            const double half = std::asin(X.radius() / dist);
            ring.theta_lo = phi - half;
            ring.theta_hi = phi + half;
        }
    }
    return ring;
}

AreaEstimate annulus_overlap_area(const PhiCircle& g, const PhiCircle& h, double delta, const Window& X,
                                  std::size_t n_samples, Rng& rng) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    const SectorRing ring = enclosing_ring(g, delta, X);
    AreaEstimate out;
    out.samples = n_samples;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Vec2 y = ring.sample(rng);
        if (X.contains(y) && g.in_neighborhood(y, delta) && h.in_neighborhood(y, delta)) ++out.hits;
    }
    const double n = static_cast<double>(n_samples);
    const double p = n > 0 ? out.hits / n : 0.0;
    out.estimate = ring.area() * p;
    out.std_error = n > 1 ? ring.area() * std::sqrt(p * (1.0 - p) / (n - 1.0)) : 0.0;
    return out;
}

std::vector<Vec2> overlap_row_extremes(const PhiCircle& g, const PhiCircle& h, double delta,
                                       const Window& X, double step) {
    const SectorRing ring = enclosing_ring(g, delta, X);
    Box2 box = Box2::square(ring.center, ring.r_outer);
    if (!X.is_full_plane()) box = box.intersect(Box2::square(X.center(), X.radius()));
    std::vector<Vec2> out;
    if (box.empty()) return out;
    const long ny = static_cast<long>(std::floor(box.height() / step));
    const long nx = static_cast<long>(std::floor(box.width() / step));
    const double rin2 = ring.r_inner * ring.r_inner, rout2 = ring.r_outer * ring.r_outer;
    for (long j = 0; j <= ny; ++j) {
        const double y2 = box.lo.y() + j * step;
        const double dy = y2 - ring.center.y();
        if (dy * dy > rout2) continue;
        bool any = false;
        Vec2 first, last;
        for (long i = 0; i <= nx; ++i) {
            const Vec2 y(box.lo.x() + i * step, y2);
            const double r2 = (y - ring.center).squaredNorm();
            if (r2 < rin2 || r2 > rout2) continue;
            if (!X.contains(y) || !g.in_neighborhood(y, delta) || !h.in_neighborhood(y, delta)) continue;
            if (!any) first = y;
            last = y;
            any = true;
        }
        if (any) {
            out.push_back(first);
            if (last != first) out.push_back(last);
        }
    }
    return out;
}

double overlap_diameter(const PhiCircle& g, const PhiCircle& h, double delta, const Window& X) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    return point_set_diameter(overlap_row_extremes(g, h, delta, X, 0.5 * delta));
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) { return wedge(a - o, b - o); };
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double point_set_diameter(std::vector<Vec2> points) {
    const auto hull = convex_hull(std::move(points));
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, (hull[i] - hull[j]).squaredNorm());
    return std::sqrt(best);
}

}  // namespace circmax::geometry
