#include "circmax/arrangement/surface.h"

#include "circmax/common/error.h"

#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace circmax::arrangement {

TangencySurface::TangencySurface(PhiCircle base, Window X, std::array<double, 3> w, double delta,
                                 double apex_clip_factor)
    : base_(std::move(base)),
      level_(base_.phi_ptr(), base_.center(), base_.radius() + w[0]),
      window_(std::move(X)),
      w_(w),
      delta_(delta),
      apex_clip_(apex_clip_factor * delta) {
    if (!(delta > 0.0)) throw PreconditionError("surface needs delta > 0");
}

std::optional<SheetPoint> TangencySurface::evaluate(Sheet s, const Vec2& x, bool windowed) const {
    const Vec2& x0 = base_.center();
    const Vec2 D = x0 - x;
    const double dn = D.norm();
    if (!(dn > apex_clip_)) return std::nullopt;
    const double theta_d = std::atan2(D.y(), D.x());
    SheetPoint out;
    if (base_.phi().is_euclidean()) {
        // Angle psi from e to D solves |D| sin psi = w3 |D + rho e|.
        const double rho = level_.radius();
        double psi = s == Sheet::upper ? 0.0 : kPi;
        double v2 = 0.0;
        for (int it = 0; it < 30; ++it) {
            v2 = dn * dn + rho * rho + 2.0 * rho * dn * std::cos(psi);
            const double sn = w_[2] * std::sqrt(v2) / dn;
            if (!(sn <= 1.0)) return std::nullopt;
            const double next = s == Sheet::upper ? std::asin(sn) : kPi - std::asin(sn);
            const bool done = std::abs(next - psi) < 1e-16;
            psi = next;
            if (done) break;
        }
        v2 = dn * dn + rho * rho + 2.0 * rho * dn * std::cos(psi);
        out.y = x0 + rho * unit_vector(theta_d - psi);
        out.r = std::sqrt(v2) - w_[1];
    } else {
        const auto& phi = base_.phi();
        auto F = [&](double th) {
            const Vec2 y = level_.point(th);
            return wedge(phi.grad_y(x0, y), phi.grad_y(x, y)) - w_[2];
        };
        double a = s == Sheet::upper ? theta_d : theta_d + kPi;
        double b = a + 1e-3;
        try {
            double fa = F(a), fb = F(b);
            for (int it = 0; it < 40 && std::abs(b - a) > 1e-15; ++it) {
                if (fb == fa) break;
                const double c = b - fb * (b - a) / (fb - fa);
                a = b;
                fa = fb;
                b = c;
                fb = F(b);
            }
            if (!(std::abs(fb) < 1e-10)) return std::nullopt;
            out.y = level_.point(b);
            out.r = phi.eval_unchecked(x, out.y) - w_[1];
        } catch (const Error&) {
            return std::nullopt;
        }
        // The secant may settle on the other sheet's root.
        const Vec2 e = (out.y - x0).normalized();
        const double along = e.dot(D) / dn;
        if ((s == Sheet::upper) != (along > 0.0)) return std::nullopt;
    }
    if (windowed && !window_.contains(out.y)) return std::nullopt;
    if (!std::isfinite(out.r)) return std::nullopt;
    return out;
}

double TangencySurface::height(Sheet s, const Vec2& x, bool windowed) const {
    const auto p = evaluate(s, x, windowed);
    return p ? p->r : std::numeric_limits<double>::quiet_NaN();
}

double TangencySurface::regularity_margin(Rng& rng, const Box2& centers, int samples) const {
    const auto& phi = base_.phi();
    const Vec2 x0 = base_.center();
    const double r0 = base_.radius();
    using V5 = Eigen::Matrix<double, 5, 1>;
    auto map = [&](const V5& z) {
        const Vec2 x(z[0], z[1]), y(z[3], z[4]);
        return Eigen::Vector3d(phi.eval_unchecked(x0, y) - r0 - w_[0], phi.eval_unchecked(x, y) - z[2] - w_[1],
                               wedge(phi.grad_y(x0, y), phi.grad_y(x, y)) - w_[2]);
    };
    double best = kInf;
    int found = 0;
    for (int attempt = 0; attempt < 40 * samples && found < samples; ++attempt) {
        const Vec2 x(uniform(rng, centers.lo.x(), centers.hi.x()), uniform(rng, centers.lo.y(), centers.hi.y()));
        const Sheet s = uniform(rng, 0.0, 1.0) < 0.5 ? Sheet::lower : Sheet::upper;
        const auto p = evaluate(s, x);
        if (!p) continue;
        ++found;
        V5 z;
        z << x.x(), x.y(), p->r, p->y.x(), p->y.y();
        Eigen::Matrix<double, 3, 5> J;
        constexpr double h = 1e-6;
        for (int k = 0; k < 5; ++k) {
            V5 zp = z, zm = z;
            zp[k] += h;
            zm[k] -= h;
            J.col(k) = (map(zp) - map(zm)) / (2.0 * h);
        }
        const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 5>> svd(J);
        best = std::min(best, svd.singularValues().minCoeff());
    }
    return best;
}

TangencySurface exact_cone(const PhiCircle& g, const Window& X, double delta) {
    return TangencySurface(g, X, {0.0, 0.0, 0.0}, delta);
}

TangencySurface tangency_surface(const PhiCircle& g, const Window& X, double delta, Rng& rng,
                                 const SurfaceOptions& options) {
    if (!(delta > 0.0)) throw PreconditionError("surface needs delta > 0");
    const double bound = delta / kOffsetDivisor;
    for (int k = 0; k < options.max_redraws; ++k) {
        const std::array<double, 3> w{uniform(rng, 0.0, bound), uniform(rng, 0.0, bound), uniform(rng, 0.0, bound)};
        TangencySurface S(g, X, w, delta);
        if (S.regularity_margin(rng, options.domain.centers, options.probe_samples) >= kRegularityFloor) return S;
    }
    throw RegularityError("no regular offset found after " + std::to_string(options.max_redraws) + " draws");
}

namespace {

double sheet_distance2(const TangencySurface& S, Sheet s, const Vec2& x, const Vec2& p, double r) {
    const double h = S.height(s, x);
    if (std::isnan(h)) return kInf;
    return (x - p).squaredNorm() + (h - r) * (h - r);
}

}  // namespace

double surface_distance(const TangencySurface& S, const Vec2& p, double r) {
    // Polar grid around p (quadratic radial spacing), then a pattern search
    // from the best few grid points of each sheet.
    constexpr int kRadial = 48, kAngular = 96;
    constexpr double kReach = 0.35;
    double best = kInf;
    for (Sheet s : {Sheet::lower, Sheet::upper}) {
        struct Seed {
            double v;
            Vec2 x;
        };
        std::vector<Seed> seeds;
        seeds.push_back({sheet_distance2(S, s, p, p, r), p});
        for (int i = 1; i <= kRadial; ++i) {
            const double q = static_cast<double>(i) / kRadial;
            const double rad = kReach * q * q;
            for (int j = 0; j < kAngular; ++j) {
                const Vec2 x = p + rad * unit_vector(2.0 * kPi * j / kAngular);
                seeds.push_back({sheet_distance2(S, s, x, p, r), x});
            }
        }
        const auto keep = std::min<std::size_t>(4, seeds.size());
        std::partial_sort(seeds.begin(), seeds.begin() + keep, seeds.end(),
                          [](const Seed& a, const Seed& b) { return a.v < b.v; });
        for (std::size_t k = 0; k < keep; ++k) {
            if (!std::isfinite(seeds[k].v)) break;
            Vec2 x = seeds[k].x;
            double v = seeds[k].v;
            double step = kReach / kRadial;
            while (step > 1e-13) {
                bool moved = false;
                for (int d = 0; d < 8; ++d) {
                    const Vec2 cand = x + step * unit_vector(kPi * d / 4.0);
                    const double cv = sheet_distance2(S, s, cand, p, r);
                    if (cv < v) {
                        v = cv;
                        x = cand;
                        moved = true;
                    }
                }
                if (!moved) step *= 0.5;
            }
            best = std::min(best, v);
        }
    }
    return std::sqrt(best);
}

double surface_distance(const TangencySurface& S, const PhiCircle& h) {
    return surface_distance(S, h.center(), h.radius());
}

double surface_distance_lower_bound(const TangencySurface& S, const Vec2& x, double r) {
    if (!S.base().phi().is_euclidean()) return 0.0;
    const double gap = std::abs((x - S.base().center()).norm() - std::abs(r - S.base().radius()));
    const auto& w = S.w();
    return std::max(0.0, gap / std::sqrt(2.0) - 2.0 * (std::abs(w[0]) + std::abs(w[1]) + std::abs(w[2])) - 1e-12);
}

bool vertical_sheet_span(const TangencySurface& S, const Vec2& x, double r, double t, double C0, int n_radial,
                         int n_angular) {
    if (!(t > 0.0) || !(t < (x - S.base().center()).norm() / kSpanRatio))
        throw PreconditionError("span check needs 0 < t < |x - x0| / " + std::to_string(kSpanRatio));
    const double limit = C0 * t;
    auto covered = [&](const Vec2& q) {
        for (Sheet s : {Sheet::lower, Sheet::upper}) {
            const double h = S.height(s, q, false);
            if (!std::isnan(h) && std::abs(h - r) < limit) return true;
        }
        return false;
    };
    if (!covered(x)) return false;
    for (int i = 1; i <= n_radial; ++i) {
        const double rad = t * (1.0 - 1e-9) * i / n_radial;
        for (int j = 0; j < n_angular; ++j)
            if (!covered(x + rad * unit_vector(2.0 * kPi * j / n_angular))) return false;
    }
    return true;
}

}  // namespace circmax::arrangement
