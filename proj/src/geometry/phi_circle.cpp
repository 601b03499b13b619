#include "circmax/geometry/phi_circle.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace circmax::geometry {

PhiPtr make_euclidean() { return std::make_shared<const DefiningFunction>(DefiningFunction::euclidean()); }

PhiCircle::PhiCircle(PhiPtr phi, Vec2 x0, double r0) : phi_(std::move(phi)), x0_(std::move(x0)), r0_(r0) {
    if (!phi_) throw DomainError("PhiCircle needs a defining function");
    if (!x0_.allFinite() || !std::isfinite(r0) || !(r0 > 0.0))
        throw DomainError("PhiCircle needs a finite center and a positive radius");
    if (phi_->is_euclidean()) {
        rho_min_ = rho_max_ = r0_;
        return;
    }
    rho_min_ = kInf;
    rho_max_ = 0.0;
    constexpr int kProbe = 256;
    for (int k = 0; k < kProbe; ++k) {
        const double r = rho(2.0 * kPi * k / kProbe);
        rho_min_ = std::min(rho_min_, r);
        rho_max_ = std::max(rho_max_, r);
    }
}

double PhiCircle::rho(double theta) const {
    if (phi_->is_euclidean()) return r0_;
    const Vec2 u = unit_vector(theta);
    // Newton on F(rho) = Phi(x0, x0 + rho u) - r0, safeguarded by a bracket.
    auto f = [&](double r) { return phi_->eval_unchecked(x0_, x0_ + r * u) - r0_; };
    double lo = 1e-6, hi = 4.0 * r0_ + 1.0;
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0)) throw EmptyCurveError("no curve point along a direction");
    double r = r0_;
    for (int it = 0; it < 100; ++it) {
        const Vec2 y = x0_ + r * u;
        const double fr = phi_->eval_unchecked(x0_, y) - r0_;
        if (fr < 0.0) lo = r;
        else hi = r;
        if (std::abs(fr) < 1e-15) return r;
        const double df = phi_->grad_y(x0_, y).dot(u);
        double next = r - fr / df;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) < 1e-15 * std::max(1.0, r)) return next;
        r = next;
    }
    return r;
}

Vec2 PhiCircle::tangent(double theta) const {
    const Vec2 u = unit_vector(theta);
    const Vec2 v = perp(u);
    const double r = rho(theta);
    if (phi_->is_euclidean()) return r * v;
    const Vec2 g = phi_->grad_y(x0_, x0_ + r * u);
    const double dr = -r * g.dot(v) / g.dot(u);
    return dr * u + r * v;
}

Vec2 PhiCircle::unit_normal(double theta) const {
    if (phi_->is_euclidean()) return unit_vector(theta);
    return unit_normal_at(point(theta));
}

std::pair<Vec2, Vec2> PhiCircle::point_normal(double theta) const {
    const Vec2 u = unit_vector(theta);
    if (phi_->is_euclidean()) return {x0_ + r0_ * u, u};
    const Vec2 y = x0_ + rho(theta) * u;
    return {y, unit_normal_at(y)};
}

void check_domain(const PhiCircle& g, const ParameterDomain& domain) {
    if (!domain.contains(g.center(), g.radius()))
        throw DomainError("circle parameters outside U_1 x (1 - tau, 1)");
}

double metric_d(const PhiCircle& g, const PhiCircle& h) {
    return (g.center() - h.center()).norm() + std::abs(g.radius() - h.radius());
}

bool AngleInterval::contains(double theta) const {
    if (hi - lo >= 2.0 * kPi) return true;
    const double shifted = lo + std::fmod(std::fmod(theta - lo, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
    return shifted <= hi;
}

std::vector<AngleInterval> window_arcs(const PhiCircle& g, const Window& X) {
    if (X.is_full_plane()) return {{-kPi, kPi}};
    const Vec2 to_b = X.center() - g.center();
    const double dist = to_b.norm();
    const double alpha = X.radius();
    if (g.phi().is_euclidean()) {
        const double r = g.radius();
        if (dist < 1e-15) {
            if (r <= alpha) return {{-kPi, kPi}};
            return {};
        }
        // |x0 + r u - b|^2 <= alpha^2  <=>  u . (b - x0) >= c.
        const double c = (r * r + dist * dist - alpha * alpha) / (2.0 * r * dist);
        if (c <= -1.0) return {{-kPi, kPi}};
        if (c > 1.0) return {};
        const double phi = std::atan2(to_b.y(), to_b.x());
        // Pull the ends in slightly so rounding never places them outside the disk.
        const double half = std::max(0.0, std::acos(c) - 1e-12);
        return {{phi - half, phi + half}};
    }
    // Generic curves: scan from a direction outside the window and bisect crossings.
    constexpr int kScan = 2048;
    auto inside = [&](double th) { return X.contains(g.point(th)); };
    double start = std::atan2(to_b.y(), to_b.x()) + kPi;
    bool found_outside = false;
    for (int k = 0; k < kScan; ++k) {
        const double th = start + 2.0 * kPi * k / kScan;
        if (!inside(th)) {
            start = th;
            found_outside = true;
            break;
        }
    }
    if (!found_outside) return {{-kPi, kPi}};
    auto refine = [&](double a, double b) {
        // inside(a) != inside(b); return the crossing end that is inside.
        const bool ia = inside(a);
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (a + b);
            if (inside(m) == ia) a = m;
            else b = m;
        }
        return ia ? a : b;
    };
    std::vector<AngleInterval> out;
    double open_at = 0.0;
    bool prev = false;
    for (int k = 1; k <= kScan; ++k) {
        const double th0 = start + 2.0 * kPi * (k - 1) / kScan;
        const double th1 = start + 2.0 * kPi * k / kScan;
        const bool cur = k == kScan ? false : inside(th1);
        if (cur && !prev) open_at = refine(th0, th1);
        if (!cur && prev) out.push_back({open_at, refine(th0, th1)});
        prev = cur;
    }
    return out;
}

bool CurveSample::empty() const {
    for (const auto& p : pieces)
        if (!p.points.empty()) return false;
    return true;
}

std::size_t CurveSample::point_count() const {
    std::size_t n = 0;
    for (const auto& p : pieces) n += p.points.size();
    return n;
}

CurveSample sample_curve(const PhiCircle& g, const Window& X, double step) {
    if (!(step > 0.0)) throw DomainError("sampling step must be positive");
    CurveSample out;
    out.step = step;
    // Speed bound for the angle parametrization.
    double vmax = 0.0;
    for (int k = 0; k < 64; ++k) vmax = std::max(vmax, g.speed(2.0 * kPi * k / 64));
    vmax *= 1.1;
    for (const auto& arc : window_arcs(g, X)) {
        Polyline line;
        const bool full = arc.length() >= 2.0 * kPi - 1e-15;
        line.closed = full;
        const int n = std::max(2, static_cast<int>(std::ceil(arc.length() * vmax / step)));
        const int last = full ? n - 1 : n;
        line.points.reserve(last + 1);
        for (int k = 0; k <= last; ++k) line.points.push_back(g.point(arc.lo + arc.length() * k / n));
        out.pieces.push_back(std::move(line));
    }
    return out;
}

void write_csv(std::ostream& os, const CurveSample& curve) {
    os << "y1,y2\n";
    char buf[80];
    for (const auto& piece : curve.pieces)
        for (const auto& p : piece.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x(), p.y());
            os << buf;
        }
}

}  // namespace circmax::geometry
