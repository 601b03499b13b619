#include "circmax/tangency/census.h"

#include "circmax/common/error.h"
#include "circmax/common/parallel.h"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>

namespace circmax::tangency {

namespace {

const PhiCircle& curve_at(const BipartitePair& P, int k) {
    return k < static_cast<int>(P.m()) ? P.white[k] : P.black[k - P.m()];
}

/// Arc centers along one window arc, stepping by `stride` in arc length.
std::vector<double> arc_centers(const PhiCircle& g, const geometry::AngleInterval& arc, double length, double stride) {
    std::vector<double> out;
    const bool full = arc.length() >= 2.0 * kPi - 1e-15;
    double th = full ? arc.lo : arc.lo + 0.5 * length / g.speed(arc.lo);
    const double end = full ? arc.hi - 0.5 * stride / g.speed(arc.hi) : arc.hi;
    while (th <= end) {
        const double half = 0.5 * length / g.speed(th);
        if (!full && th + half > arc.hi) break;
        if (full || th - half >= arc.lo) out.push_back(th);
        th += stride / g.speed(th);
    }
    return out;
}

}  // namespace

std::vector<CanonicalRect> canonical_family(const BipartitePair& P, const Window& X, const CensusOptions& options) {
    if (!(P.delta > 0.0) || P.t < options.min_ratio * P.delta)
        throw PreconditionError("census needs t >= " + std::to_string(options.min_ratio) + " delta");
    const int total = static_cast<int>(P.m() + P.n());
    const double length = std::sqrt(P.delta / P.t);
    std::vector<std::vector<CanonicalRect>> per_curve(total);
    parallel_for(total, options.jobs, [&](std::size_t k) {
        const PhiCircle& g = curve_at(P, static_cast<int>(k));
        for (const auto& arc : geometry::window_arcs(g, X)) {
            for (double th : arc_centers(g, arc, length, options.stride * length)) {
                CanonicalRect c{Rectangle(g, th, P.delta, P.t), static_cast<int>(k), {}, {}};
                for (int j = 0; j < total; ++j) {
                    if (!incident(curve_at(P, j), c.rect, options.C1)) continue;
                    if (j < static_cast<int>(P.m())) c.whites.push_back(j);
                    else c.blacks.push_back(j - static_cast<int>(P.m()));
                }
                per_curve[k].push_back(std::move(c));
            }
        }
    });
    std::vector<CanonicalRect> out;
    for (auto& v : per_curve)
        for (auto& c : v) out.push_back(std::move(c));
    return out;
}

RectCensus rect_census(const BipartitePair& P, const Window& X, const CensusOptions& options) {
    RectCensus census;
    const double reach = 2.0 * std::sqrt(options.C0 * P.delta / P.t) + 2.0 * options.C0 * P.delta;
    for (auto& c : canonical_family(P, X, options)) {
        if (c.whites.empty() || c.blacks.empty()) continue;
        const Vec2 p = c.rect.center_point();
        bool clash = false;
        for (const auto& e : census.entries) {
            if ((e.rect.center_point() - p).norm() > reach) continue;
            if (comparable(e.rect, c.rect, options.C0)) {
                clash = true;
                break;
            }
        }
        if (!clash)
            census.entries.push_back(
                {c.rect, c.curve, static_cast<int>(c.whites.size()), static_cast<int>(c.blacks.size())});
    }
    return census;
}

std::size_t count_type(const RectCensus& census, int mu, int nu) {
    if (mu < 1 || nu < 1) throw PreconditionError("count_type needs mu, nu >= 1");
    return static_cast<std::size_t>(std::count_if(census.entries.begin(), census.entries.end(),
                                                  [&](const CensusEntry& e) { return e.mu >= mu && e.nu >= nu; }));
}

void write_census_csv(std::ostream& os, const RectCensus& census) {
    os << "curve,arc_center,mu,nu\n";
    char buf[96];
    for (const auto& e : census.entries) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%d\n", e.curve, e.rect.arc_center(), e.mu, e.nu);
        os << buf;
    }
}

ClusterSplit cluster_split(const BipartitePair& P, const Window& X, int mu0, const CensusOptions& options) {
    if (mu0 < 1) throw PreconditionError("cluster_split needs mu0 >= 1");
    std::vector<CanonicalRect> family = canonical_family(P, X, options);
    std::erase_if(family, [](const CanonicalRect& c) { return c.blacks.empty() || c.whites.empty(); });

    std::vector<int> mu(family.size());
    std::vector<std::vector<int>> rects_of(P.m());
    for (std::size_t r = 0; r < family.size(); ++r) {
        mu[r] = static_cast<int>(family[r].whites.size());
        for (int w : family[r].whites) rects_of[w].push_back(static_cast<int>(r));
    }
    std::vector<char> removed(P.m(), 0);
    ClusterSplit split;
    for (;;) {
        int best = -1;
        for (std::size_t r = 0; r < family.size(); ++r)
            if (mu[r] >= mu0 && (best < 0 || mu[r] > mu[best])) best = static_cast<int>(r);
        if (best < 0) break;
        std::vector<int> cluster;
        for (int w : family[best].whites) {
            if (removed[w]) continue;
            removed[w] = 1;
            cluster.push_back(w);
            for (int r : rects_of[w]) --mu[r];
        }
        split.clusters.push_back(std::move(cluster));
        split.representatives.push_back(family[best].rect);
    }
    for (std::size_t w = 0; w < P.m(); ++w)
        if (!removed[w]) split.good.push_back(static_cast<int>(w));
    return split;
}

}  // namespace circmax::tangency
