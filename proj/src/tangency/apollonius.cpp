#include "circmax/tangency/apollonius.h"

#include "circmax/common/error.h"
#include "circmax/geometry/delta.h"

#include <algorithm>
#include <numeric>

namespace circmax::tangency {

double params_distance(const CircleParams& a, const CircleParams& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]) + std::abs(a[2] - b[2]);
}

std::vector<Vec2> neighborhood_overlap(const PhiCircle& g, double wg, const PhiCircle& h, double wh,
                                       const Window& B, double level_step, double arc_step) {
    std::vector<Vec2> out;
    const int levels = std::max(1, static_cast<int>(std::ceil(wg / level_step)));
    for (const auto& arc : geometry::window_arcs(g, B)) {
        const double v = g.speed(0.5 * (arc.lo + arc.hi));
        const int n = std::max(1, static_cast<int>(std::ceil(arc.length() * v / arc_step)));
        for (int k = 0; k <= n; ++k) {
            const double th = arc.lo + arc.length() * k / n;
            const Vec2 p = g.point(th);
            if (std::abs(h.level(p)) > wh + 2.0 * wg) continue;
            const Vec2 grad = g.phi().grad_y(g.center(), p);
            const Vec2 unit_level = grad / grad.squaredNorm();
            for (int j = -levels; j <= levels; ++j) {
                const Vec2 y = p + (wg * j / levels) * unit_level;
                if (std::abs(g.level(y)) <= wg && std::abs(h.level(y)) <= wh && B.contains(y)) out.push_back(y);
            }
        }
    }
    return out;
}

namespace {

/// Min distance between two point sets lying near one curve around `center`:
/// points are swept in angle order and the scan stops once the chord bound
/// for the angle gap exceeds the best distance.
double set_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b, const Vec2& center, double rho_min) {
    if (a.empty() || b.empty()) return kInf;
    std::vector<std::pair<double, Vec2>> sb;
    sb.reserve(b.size());
    for (const auto& q : b) sb.emplace_back(std::atan2(q.y() - center.y(), q.x() - center.x()), q);
    std::sort(sb.begin(), sb.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    double best = kInf;
    for (const auto& p : a) {
        const double th = std::atan2(p.y() - center.y(), p.x() - center.x());
        const auto it = std::lower_bound(sb.begin(), sb.end(), th, [](const auto& e, double v) { return e.first < v; });
        const std::ptrdiff_t mid = it - sb.begin();
        auto chord = [&](double dth) { return 2.0 * rho_min * std::sin(std::min(kPi, std::abs(dth)) / 2.0); };
        for (std::ptrdiff_t k = mid; k < static_cast<std::ptrdiff_t>(sb.size()); ++k) {
            if (chord(sb[k].first - th) > best) break;
            best = std::min(best, (p - sb[k].second).norm());
        }
        for (std::ptrdiff_t k = mid - 1; k >= 0; --k) {
            if (chord(sb[k].first - th) > best) break;
            best = std::min(best, (p - sb[k].second).norm());
        }
    }
    return best;
}

}  // namespace

bool in_y_set(const PhiCircle& c, const std::array<PhiCircle, 3>& triple, double t, double delta, const Window& X,
              const ProbeOptions& options) {
    const double tol = options.C1 * delta;
    for (const auto& g : triple)
        if (geometry::delta_lower_bound(c, g) >= tol) return false;
    for (const auto& g : triple)
        if (!(geometry::metric_d(c, g) > t)) return false;
    const Window X1 = X.shrunk(1);
    for (const auto& g : triple)
        if (!(geometry::delta_fast(c, g, X1) < tol)) return false;

    const Window B0 = X.shrunk(2);
    const double sep = options.C3 * std::sqrt(delta / t);
    const double level_step = 0.5 * delta;
    const double arc_step = std::max(level_step, 0.125 * std::min(sep, std::sqrt(delta / t)));
    std::array<std::vector<Vec2>, 3> narrow, wide;
    for (int i = 0; i < 3; ++i) {
        narrow[i] = neighborhood_overlap(c, delta, triple[i], delta, B0, level_step, arc_step);
        if (narrow[i].empty()) return false;
    }
    for (int i = 0; i < 3; ++i) wide[i] = neighborhood_overlap(c, tol, triple[i], tol, B0, level_step, arc_step);
    const double rho = c.rho_min() - tol;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && !(set_distance(wide[i], narrow[j], c.center(), rho) > sep)) return false;
    return true;
}

std::vector<std::vector<int>> single_linkage(const std::vector<CircleParams>& pts, double radius) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (params_distance(pts[i], pts[j]) <= radius) parent[find(i)] = find(j);
    std::vector<std::vector<int>> clusters;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(clusters.size());
            clusters.emplace_back();
        }
        clusters[slot[r]].push_back(i);
    }
    return clusters;
}

ProbeResult appolonius_probe(const std::array<PhiCircle, 3>& triple, double t, double delta, const Window& X,
                             std::size_t n_candidates, Rng& rng, const ProbeOptions& options) {
    if (!(t > options.min_ratio * delta) || !(delta > 0.0))
        throw PreconditionError("probe needs t > " + std::to_string(options.min_ratio) + " delta");
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (geometry::metric_d(triple[i], triple[j]) < t)
                throw PreconditionError("probe circles must be pairwise at least t apart");

    const auto& phi = triple[0].phi_ptr();
    const Box2& box = options.domain.centers;
    const double r_lo = 1.0 - options.domain.tau, r_hi = 1.0;
    const bool euclidean = phi->is_euclidean();
    const Vec2 x1 = triple[0].center(), x2 = triple[1].center(), x3 = triple[2].center();
    const double r1 = triple[0].radius(), r2 = triple[1].radius(), r3 = triple[2].radius();
    const double tol = options.C1 * delta;

    ProbeResult result;
    result.candidates = n_candidates;
    for (std::size_t k = 0; k < n_candidates; ++k) {
        Vec2 x(uniform(rng, box.lo.x(), box.hi.x()), uniform(rng, box.lo.y(), box.hi.y()));
        double r;
        if (euclidean) {
            // Newton onto the circles tangent to all three (random tangency
            // signs), then a jitter at a log-uniform scale in [C1 delta, t].
            const double s1 = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            const double s2 = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            const double s3 = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            auto radius_at = [&](const Vec2& y) { return r1 + s1 * (y - x1).norm(); };
            bool converged = false;
            for (int it = 0; it < 30 && !converged; ++it) {
                const double rr = radius_at(x);
                const Vec2 a2 = x - x2, a3 = x - x3, b = x - x1;
                if (a2.norm() < 1e-12 || a3.norm() < 1e-12 || b.norm() < 1e-12) break;
                const Eigen::Vector2d F(a2.norm() - s2 * (rr - r2), a3.norm() - s3 * (rr - r3));
                if (F.cwiseAbs().maxCoeff() < 1e-13) {
                    converged = true;
                    break;
                }
                Mat2 J;
                J.row(0) = (a2.normalized() - s2 * s1 * b.normalized()).transpose();
                J.row(1) = (a3.normalized() - s3 * s1 * b.normalized()).transpose();
                if (std::abs(J.determinant()) < 1e-12) break;
                x -= J.partialPivLu().solve(F);
                if (!x.allFinite() || x.norm() > 1.0) break;
            }
            if (!converged) continue;
            const double scale = tol * std::pow(t / tol, uniform(rng, 0.0, 1.0));
            Eigen::Vector3d dir(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng),
                                std::normal_distribution<double>()(rng));
            dir *= scale * std::cbrt(uniform(rng, 0.0, 1.0)) / dir.norm();
            r = radius_at(x) + dir.z();
            x += Vec2(dir.x(), dir.y());
        } else {
            r = uniform(rng, r_lo, r_hi);
        }
        if (!box.contains(x) || !(r > r_lo && r < r_hi)) continue;
        const PhiCircle c(phi, x, r);
        if (in_y_set(c, triple, t, delta, X, options)) result.survivors.push_back({x.x(), x.y(), r});
    }
    result.insufficient = result.survivors.size() < options.min_survivors;
    result.clusters = single_linkage(result.survivors, options.linkage * t);
    for (const auto& cl : result.clusters) {
        double diam = 0.0;
        for (std::size_t a = 0; a < cl.size(); ++a)
            for (std::size_t b = a + 1; b < cl.size(); ++b)
                diam = std::max(diam, params_distance(result.survivors[cl[a]], result.survivors[cl[b]]));
        result.diameters.push_back(diam);
    }
    return result;
}

}  // namespace circmax::tangency
