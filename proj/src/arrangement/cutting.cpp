#include "circmax/arrangement/cutting.h"

#include "circmax/common/error.h"
#include "circmax/geometry/delta.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace circmax::arrangement {

std::size_t Cutting::max_crossing() const {
    std::size_t m = 0;
    for (const auto& l : crossing_lists) m = std::max(m, l.size());
    return m;
}

double Cutting::mean_crossing() const {
    if (crossing_lists.empty()) return 0.0;
    double s = 0.0;
    for (const auto& l : crossing_lists) s += static_cast<double>(l.size());
    return s / static_cast<double>(crossing_lists.size());
}

namespace {

bool same_circle(const PhiCircle& a, const PhiCircle& b) {
    return a.center() == b.center() && a.radius() == b.radius();
}

std::vector<int> sample_distinct(const std::vector<PhiCircle>& family, int N, Rng& rng, int max_draws) {
    const int n = static_cast<int>(family.size());
    std::vector<int> chosen;
    std::uniform_int_distribution<int> pick(0, std::max(0, n - 1));
    int draws = 0;
    while (static_cast<int>(chosen.size()) < N) {
        if (++draws > max_draws || n == 0)
            throw SamplingError("could not draw " + std::to_string(N) + " distinct circles");
        const int idx = pick(rng);
        bool clash = false;
        for (int c : chosen)
            if (c == idx || same_circle(family[c], family[idx])) clash = true;
        if (!clash) chosen.push_back(idx);
    }
    return chosen;
}

void check_sample_size(int n, int N, const CuttingOptions& options) {
    if (N < 0) throw PreconditionError("sample size must be nonnegative");
    if (N > n) throw SamplingError("sample larger than the family");
    if (!options.relax_precondition && N * options.C > n)
        throw PreconditionError("cutting needs N <= n / " + std::to_string(options.C));
}

}  // namespace

Cutting cutting(const std::vector<PhiCircle>& family, int N, double delta, const Window& X, Rng& rng,
                const CuttingOptions& options) {
    const int n = static_cast<int>(family.size());
    check_sample_size(n, N, options);
    Cutting out;
    out.sample = sample_distinct(family, N, rng, options.max_draws);
    out.family_surfaces.reserve(n);
    for (const auto& g : family) out.family_surfaces.push_back(tangency_surface(g, X, delta, rng));
    std::vector<TangencySurface> dividing;
    for (int idx : out.sample) dividing.push_back(out.family_surfaces[idx]);
    out.decomposition = vertical_decomposition(std::move(dividing), options.box, options.decomposition, &rng);

    std::vector<int> slot(n, -1);
    for (std::size_t k = 0; k < out.sample.size(); ++k) slot[out.sample[k]] = static_cast<int>(k);
    out.crossing_lists.assign(out.decomposition.cells().size(), {});
    for (int idx = 0; idx < n; ++idx) {
        const TangencySurface& S =
            slot[idx] >= 0 ? out.decomposition.surfaces()[slot[idx]] : out.family_surfaces[idx];
        for (int c : crossed_cells(out.decomposition, S)) out.crossing_lists[c].push_back(idx);
    }
    return out;
}

double crossing_bound(int n, int N, double C) {
    return C * static_cast<double>(n) / std::max(N, 1) * std::log(static_cast<double>(std::max(n, 2)));
}

std::vector<ReferenceRegion> reference_regions(Rng& rng, int count, const ParameterDomain& box, double min_side,
                                               double max_side) {
    std::vector<ReferenceRegion> out;
    const double r_lo = 1.0 - box.tau, r_hi = 1.0;
    auto side = [&] { return min_side * std::pow(max_side / min_side, uniform(rng, 0.0, 1.0)); };
    for (int k = 0; k < count; ++k) {
        const double sx = std::min(side(), box.centers.width()), sr = std::min(side(), r_hi - r_lo);
        const Vec2 lo(uniform(rng, box.centers.lo.x(), box.centers.hi.x() - sx),
                      uniform(rng, box.centers.lo.y(), box.centers.hi.y() - sx));
        const double rl = uniform(rng, r_lo, r_hi - sr);
        out.push_back({{lo, lo + Vec2(sx, sx)}, rl, rl + sr});
    }
    return out;
}

bool meets(const TangencySurface& S, const ReferenceRegion& region, int k) {
    for (Sheet sh : {Sheet::lower, Sheet::upper}) {
        double lo = kInf, hi = -kInf;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                const Vec2 x = region.x.lo + Vec2(region.x.width() * a / (k - 1), region.x.height() * b / (k - 1));
                const double h = S.height(sh, x);
                if (std::isnan(h)) continue;
                if (h >= region.r_lo && h <= region.r_hi) return true;
                lo = std::min(lo, h);
                hi = std::max(hi, h);
            }
        if (lo < region.r_lo && hi > region.r_hi) return true;
    }
    return false;
}

std::vector<TailObservation> tail_observations(const Cutting& cut, const std::vector<ReferenceRegion>& regions) {
    std::vector<TailObservation> out;
    std::vector<char> in_sample(cut.family_surfaces.size(), 0);
    for (int idx : cut.sample) in_sample[idx] = 1;
    for (const auto& region : regions) {
        TailObservation obs;
        obs.avoided = true;
        for (std::size_t idx = 0; idx < cut.family_surfaces.size(); ++idx)
            if (meets(cut.family_surfaces[idx], region)) {
                ++obs.crossings;
                if (in_sample[idx]) obs.avoided = false;
            }
        out.push_back(obs);
    }
    return out;
}

std::size_t binomial_upper_quantile(std::size_t trials, double p, double level) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double n = static_cast<double>(trials);
    double cdf = 0.0;
    for (std::size_t k = 0; k <= trials; ++k) {
        const double kk = static_cast<double>(k);
        const double log_pmf = std::lgamma(n + 1) - std::lgamma(kk + 1) - std::lgamma(n - kk + 1) + kk * std::log(p) +
                               (n - kk) * std::log1p(-p);
        cdf += std::exp(log_pmf);
        if (cdf >= level) return k;
    }
    return trials;
}

TailStats tail_test(const std::vector<TailObservation>& observations, double lambda, int n, int N, double level) {
    TailStats st;
    st.lambda = lambda;
    for (const auto& o : observations)
        if (o.crossings >= lambda) {
            ++st.trials;
            if (o.avoided) ++st.avoided;
        }
    st.bound = std::pow(std::max(0.0, 1.0 - lambda / n), N);
    st.upper_band = binomial_upper_quantile(st.trials, st.bound, level);
    st.pass = st.avoided <= st.upper_band;
    return st;
}

void write_crossing_csv(std::ostream& os, const std::vector<CrossingRow>& rows) {
    os << "seed,N,n,max_crossing,mean_crossing\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%llu,%d,%d,%zu,%.17g\n", static_cast<unsigned long long>(r.seed), r.N, r.n,
                      r.max_crossing, r.mean_crossing);
        os << buf;
    }
}

std::size_t WhitePartition::max_black_group() const {
    std::size_t m = 0;
    for (const auto& g : groups) m = std::max(m, g.blacks.size());
    return m;
}

WhitePartition partition_white(const tangency::BipartitePair& P, int N, double delta, const Window& X, Rng& rng,
                               const PartitionOptions& options) {
    const int m = static_cast<int>(P.m());
    check_sample_size(m, N, options.cutting);
    WhitePartition out;
    out.sample = sample_distinct(P.white, N, rng, options.cutting.max_draws);
    std::vector<TangencySurface> dividing;
    for (int idx : out.sample) dividing.push_back(tangency_surface(P.white[idx], X, delta, rng));
    const Decomposition D =
        vertical_decomposition(std::move(dividing), options.cutting.box, options.cutting.decomposition, &rng);

    const double near = options.C_surface * delta;
    std::vector<int> cell_of(m, -1);
    for (int i = 0; i < m; ++i) {
        const PhiCircle& g = P.white[i];
        bool close = false;
        for (const auto& S : D.surfaces()) {
            if (surface_distance_lower_bound(S, g.center(), g.radius()) > near) continue;
            if (surface_distance(S, g) <= near) {
                close = true;
                break;
            }
        }
        if (close) out.w_star.push_back(i);
        else cell_of[i] = D.locate_closure(g.center(), g.radius());
    }

    const auto pairs = tangency::tangency_pairs(P, X, options.C_tangent);
    std::vector<std::vector<int>> partners(m);
    for (const auto& [w, b] : pairs) partners[w].push_back(b);
    std::vector<int> group_of_cell(D.cells().size(), -1);
    for (int i = 0; i < m; ++i) {
        if (cell_of[i] < 0) continue;
        int& gi = group_of_cell[cell_of[i]];
        if (gi < 0) {
            gi = static_cast<int>(out.groups.size());
            out.groups.push_back({cell_of[i], {}, {}});
        }
        auto& grp = out.groups[gi];
        grp.whites.push_back(i);
        grp.blacks.insert(grp.blacks.end(), partners[i].begin(), partners[i].end());
    }
    for (auto& grp : out.groups) {
        std::sort(grp.blacks.begin(), grp.blacks.end());
        grp.blacks.erase(std::unique(grp.blacks.begin(), grp.blacks.end()), grp.blacks.end());
    }
    return out;
}

bool is_exact_partition(const WhitePartition& part, std::size_t whites) {
    std::vector<int> seen(whites, 0);
    auto mark = [&](int i) {
        if (i < 0 || static_cast<std::size_t>(i) >= whites) return false;
        return ++seen[i] == 1;
    };
    for (int i : part.w_star)
        if (!mark(i)) return false;
    for (const auto& g : part.groups)
        for (int i : g.whites)
            if (!mark(i)) return false;
    return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

}  // namespace circmax::arrangement
