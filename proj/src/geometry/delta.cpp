#include "circmax/geometry/delta.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <tuple>

namespace circmax::geometry {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

/// Minimizes a function on [a, b] by golden-section search.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct ArcGrid {
    std::vector<double> theta;
    std::vector<Vec2> point;
    std::vector<Vec2> normal;
    std::vector<int> arc;  // index into arcs
    std::vector<AngleInterval> arcs;
    double dtheta = 0.0;
};

ArcGrid build_grid(const PhiCircle& g, const Window& X, double resolution) {
    ArcGrid grid;
    grid.arcs = window_arcs(g, X);
    double vmax = 0.0;
    for (int k = 0; k < 32; ++k) vmax = std::max(vmax, g.speed(2.0 * kPi * k / 32));
    grid.dtheta = resolution / vmax;
    for (std::size_t a = 0; a < grid.arcs.size(); ++a) {
        const auto& arc = grid.arcs[a];
        const bool full = arc.length() >= 2.0 * kPi - 1e-15;
        const int n = std::max(1, static_cast<int>(std::ceil(arc.length() / grid.dtheta)));
        const int last = full ? n - 1 : n;
        for (int k = 0; k <= last; ++k) {
            const double th = arc.lo + arc.length() * k / n;
            grid.theta.push_back(th);
            const auto [p, n] = g.point_normal(th);
            grid.point.push_back(p);
            grid.normal.push_back(n);
            grid.arc.push_back(static_cast<int>(a));
        }
    }
    return grid;
}

/// Clip a bracket around theta to its arc (no clipping on full circles).
std::pair<double, double> bracket(const AngleInterval& arc, double theta, double half) {
    if (arc.length() >= 2.0 * kPi - 1e-15) return {theta - half, theta + half};
    return {std::max(arc.lo, theta - half), std::min(arc.hi, theta + half)};
}

bool precedes(const PhiCircle& a, const PhiCircle& b) {
    return std::tuple(a.center().x(), a.center().y(), a.radius()) <
           std::tuple(b.center().x(), b.center().y(), b.radius());
}

double delta_ordered(const PhiCircle& g, const PhiCircle& h, const Window& X, double resolution) {
    const ArcGrid a = build_grid(g, X, resolution);
    const ArcGrid b = build_grid(h, X, resolution);
    if (a.theta.empty() || b.theta.empty()) return kInf;

    const std::size_t na = a.theta.size(), nb = b.theta.size();
    constexpr double kTol = 1e-9;
    // Row profile: for each grid angle on g, the best partner on h, refined
    // inside one grid cell so the profile is free of grid-offset noise.
    auto objective = [&](const Vec2& p, const Vec2& n, double tb) {
        const auto [q, m] = h.point_normal(tb);
        return (p - q).norm() + (n - m).norm();
    };
    std::vector<double> row_val(na, kInf), row_tb(na, 0.0);
    std::vector<std::size_t> row_j(na, 0);
    for (std::size_t i = 0; i < na; ++i) {
        const Vec2 p = a.point[i], n = a.normal[i];
        double best = kInf;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < nb; ++j) {
            const double v = (p - b.point[j]).norm() + (n - b.normal[j]).norm();
            if (v < best) {
                best = v;
                arg = j;
            }
        }
        row_val[i] = best;
        row_j[i] = arg;
        row_tb[i] = b.theta[arg];
    }
    // Grid offsets perturb the profile by at most about one grid step in each
    // term; rows that cannot reach the minimum are left unrefined.
    const double coarse_min = *std::min_element(row_val.begin(), row_val.end());
    const double slack = 4.0 * resolution * (1.0 + 1.0 / std::max(0.1, g.rho_min()));
    for (std::size_t i = 0; i < na; ++i) {
        if (row_val[i] > coarse_min + slack) continue;
        const Vec2 p = a.point[i], n = a.normal[i];
        const auto [lo, hi] = bracket(b.arcs[b.arc[row_j[i]]], b.theta[row_j[i]], b.dtheta);
        const auto [tb, val] = golden_min([&](double t) { return objective(p, n, t); }, lo, hi, kTol);
        if (val <= row_val[i]) {
            row_val[i] = val;
            row_tb[i] = tb;
        }
    }

    // Local minima of the row profile are refinement seeds.
    std::vector<std::size_t> seeds;
    for (std::size_t i = 0; i < na; ++i) {
        const bool left_ok = i == 0 || a.arc[i - 1] != a.arc[i] || row_val[i] <= row_val[i - 1];
        const bool right_ok = i + 1 == na || a.arc[i + 1] != a.arc[i] || row_val[i] <= row_val[i + 1];
        if (left_ok && right_ok) seeds.push_back(i);
    }
    std::sort(seeds.begin(), seeds.end(), [&](std::size_t l, std::size_t r) {
        return row_val[l] != row_val[r] ? row_val[l] < row_val[r] : l < r;
    });
    constexpr std::size_t kSeeds = 4;
    if (seeds.size() > kSeeds) seeds.resize(kSeeds);

    double best = *std::min_element(row_val.begin(), row_val.end());
    for (std::size_t s : seeds) {
        const AngleInterval& arc_a = a.arcs[a.arc[s]];
        const AngleInterval& arc_b = b.arcs[b.arc[row_j[s]]];
        const bool full_a = arc_a.length() >= 2.0 * kPi - 1e-15;
        double center_a = a.theta[s];
        double center_b = row_tb[s];
        // Recenter while the optimum lands on an unclipped bracket edge; the
        // outer bracket doubles on every move to cross flat valleys quickly.
        double half_a = a.dtheta;
        for (int walk = 0; walk < 12; ++walk, half_a *= 2.0) {
            const auto [lo_a, hi_a] = bracket(arc_a, center_a, half_a);
            double inner_arg = center_b;
            auto inner = [&](double ta) {
                const auto [p, n] = g.point_normal(ta);
                const auto [lo_b, hi_b] = bracket(arc_b, center_b + (ta - center_a), 2.0 * b.dtheta);
                const auto [arg, val] = golden_min([&](double t) { return objective(p, n, t); }, lo_b, hi_b, kTol);
                inner_arg = arg;
                return val;
            };
            const auto [ta, val] = golden_min(inner, lo_a, hi_a, kTol);
            inner(ta);
            best = std::min(best, val);
            const double eps = 1e-3 * a.dtheta;
            const bool edge_a = (ta - lo_a < eps && (full_a || lo_a > arc_a.lo)) ||
                                (hi_a - ta < eps && (full_a || hi_a < arc_a.hi));
            const bool edge_b = std::abs(inner_arg - center_b - (ta - center_a)) > 1.99 * b.dtheta;
            if (!edge_a && !edge_b) break;
            center_a = ta;
            center_b = inner_arg;
        }
    }
    return best;
}

}  // namespace

double delta(const PhiCircle& g, const PhiCircle& h, const Window& X, double resolution) {
    if (!(resolution > 0.0)) throw DomainError("delta resolution must be positive");
    return precedes(h, g) ? delta_ordered(h, g, X, resolution) : delta_ordered(g, h, X, resolution);
}

double delta_closed_form(const PhiCircle& g, const PhiCircle& h) {
    return std::abs((g.center() - h.center()).norm() - std::abs(g.radius() - h.radius()));
}

double delta_lower_bound(const PhiCircle& g, const PhiCircle& h) {
    if (g.phi().is_euclidean() && h.phi().is_euclidean()) return delta_closed_form(g, h);
    return 0.0;
}

double delta_fast(const PhiCircle& g, const PhiCircle& h, const Window& X, double resolution) {
    if (g.phi().is_euclidean() && h.phi().is_euclidean()) {
        const Vec2 dx = g.center() - h.center();
        const double s = g.radius() - h.radius();
        const double nd = dx.norm();
        Vec2 u;
        if (nd > 1e-12 && s != 0.0) {
            u = (s > 0.0 ? -1.0 : 1.0) * dx / nd;
        } else {
            const Vec2 toward = X.center() - g.center();
            u = (X.is_full_plane() || toward.norm() < 1e-12) ? Vec2(1.0, 0.0) : toward.normalized();
        }
        if (X.contains(g.center() + g.radius() * u) && X.contains(h.center() + h.radius() * u))
            return delta_closed_form(g, h);
    }
    return delta(g, h, X, resolution);
}

Vec2 parallel_normal_point(const PhiCircle& g, const PhiCircle& h, const Window& X,
                           const ParallelNormalOptions& options) {
    const Vec2& x0 = g.center();
    const Vec2& xt = h.center();
    const double sep = (x0 - xt).norm();
    if (sep < 1e-12) throw HypothesisError("parallel-normal point needs distinct centers");
    const double d = delta(g, h, X.shrunk(), kDeltaResolution);
    if (!(d <= options.hypothesis_ratio * sep))
        throw HypothesisError("Delta is not small relative to the center separation");

    auto wedge_at = [&](double th) {
        const Vec2 y = g.point(th);
        return wedge(g.phi().grad_y(x0, y), g.phi().grad_y(xt, y));
    };
    std::vector<std::pair<double, double>> roots;
    for (AngleInterval arc : window_arcs(g, X)) {
        // Full circles start off-axis so a root cannot hide on the seam.
        if (arc.length() >= 2.0 * kPi - 1e-15) arc = {arc.lo + 0.1234567, arc.hi + 0.1234567};
        double vmax = 0.0;
        for (int k = 0; k < 16; ++k) vmax = std::max(vmax, g.speed(arc.lo + arc.length() * k / 16));
        const int n = std::max(2, static_cast<int>(std::ceil(arc.length() * vmax / options.resolution)));
        double prev_t = arc.lo, prev_w = wedge_at(arc.lo);
        for (int k = 1; k <= n; ++k) {
            const double t = arc.lo + arc.length() * k / n;
            const double w = wedge_at(t);
            if (prev_w == 0.0 || (prev_w < 0.0) != (w < 0.0)) {
                if (w != 0.0 || prev_w != 0.0) roots.emplace_back(prev_t, t);
            }
            prev_t = t;
            prev_w = w;
        }
    }
    // A root sitting exactly on a sample point is reported by two adjacent brackets.
    std::vector<std::pair<double, double>> merged;
    for (const auto& r : roots)
        if (merged.empty() || r.first > merged.back().second + 1e-15) merged.push_back(r);
        else merged.back().second = r.second;
    if (merged.empty()) throw HypothesisError("no parallel-normal point inside the window");
    if (merged.size() > 1) throw NonUniqueError("several parallel-normal points inside the window");
    double lo = merged[0].first, hi = merged[0].second;
    const bool neg_lo = wedge_at(lo) < 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double m = 0.5 * (lo + hi);
        const double w = wedge_at(m);
        if (w == 0.0) return g.point(m);
        if ((w < 0.0) == neg_lo) lo = m;
        else hi = m;
    }
    return g.point(0.5 * (lo + hi));
}

}  // namespace circmax::geometry
