#include "circmax/harness/experiments.h"

#include "circmax/common/error.h"
#include "circmax/common/parallel.h"
#include "circmax/geometry/delta.h"
#include "circmax/harness/families.h"
#include "circmax/maximal/maximal.h"
#include "circmax/tangency/census.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

namespace circmax::harness {

using arrangement::TangencySurface;

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope needs two or more points");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw PreconditionError("log-log slope needs positive values");
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(y[k]));
    }
    return maximal::fit_line(lx, ly)[0];
}

std::vector<PhiCircle> make_family(const std::string& kind, int N, Rng& rng) {
    if (N < 1) throw PreconditionError("family size must be positive");
    if (kind == "random") return random_circles(rng, N, geometry::make_euclidean());
    if (kind == "pencil") return pencil_family(N);
    if (kind == "concentric-shift") return concentric_shift_family(N);
    throw ConfigError("unknown family '" + kind + "'");
}

std::size_t near_tangent_pairs(const std::vector<PhiCircle>& family, double delta, const geometry::Window& X,
                               unsigned jobs) {
    const std::size_t n = family.size();
    std::vector<std::size_t> per_row(n, 0);
    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (geometry::delta_lower_bound(family[i], family[j]) >= delta) continue;
            if (geometry::delta_fast(family[i], family[j], X) < delta) ++per_row[i];
        }
    });
    std::size_t total = 0;
    for (auto c : per_row) total += c;
    return total;
}

std::vector<TangencyCountRow> tangency_count(const TangencyCountOptions& options, std::uint64_t seed) {
    if (options.seeds < 1 || !(options.delta_scale > 0.0)) throw ConfigError("tangency-count needs seeds >= 1 and delta_scale > 0");
    const auto X = geometry::default_window();
    std::vector<TangencyCountRow> rows;
    for (const auto& fam : options.families)
        for (int N : options.sizes)
            for (int trial = 0; trial < options.seeds; ++trial) {
                TangencyCountRow row;
                row.family = fam;
                row.N = N;
                row.trial = trial;
                row.seed = stream_seed(seed, static_cast<std::uint64_t>(trial));
                row.delta = options.delta_scale / N;
                Rng rng(row.seed);
                const auto family = make_family(fam, N, rng);
                row.pairs = near_tangent_pairs(family, row.delta, X, options.jobs);
                if (options.census) {
                    tangency::BipartitePair P;
                    P.t = options.census_t;
                    P.delta = row.delta;
                    for (int k = 0; k < N; ++k) (k % 2 == 0 ? P.white : P.black).push_back(family[k]);
                    tangency::CensusOptions co;
                    co.jobs = options.jobs;
                    row.census = static_cast<long long>(tangency::count_type(tangency::rect_census(P, X, co), 1, 1));
                }
                rows.push_back(row);
            }
    return rows;
}

double tangency_exponent(const std::vector<TangencyCountRow>& rows, const std::string& family) {
    std::map<int, double> totals;
    for (const auto& r : rows)
        if (r.family == family) totals[r.N] += static_cast<double>(r.pairs);
    std::vector<double> x, y;
    for (const auto& [N, c] : totals) {
        x.push_back(N);
        y.push_back(c);
    }
    return loglog_slope(x, y);
}

void write_tangency_csv(std::ostream& os, const std::vector<TangencyCountRow>& rows) {
    os << "family,N,trial,seed,delta,pairs,census\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%llu,%.17g,%zu,%lld\n", r.family.c_str(), r.N, r.trial,
                      static_cast<unsigned long long>(r.seed), r.delta, r.pairs, r.census);
        os << buf;
    }
}

std::vector<CuttingTrial> cutting_experiment(const CuttingExperimentOptions& options, std::uint64_t seed) {
    if (options.n < 2 || options.N < 1 || options.trials < 1 || options.grid < 1)
        throw ConfigError("cutting needs n >= 2, N >= 1, trials >= 1 and grid >= 1");
    std::vector<CuttingTrial> out(options.trials);
    const auto X = geometry::default_window();
    parallel_for(out.size(), options.jobs, [&](std::size_t k) {
        const std::uint64_t s = stream_seed(seed, k);
        Rng rng(s);
        const auto family = random_circles(rng, options.n, geometry::make_euclidean());
        arrangement::CuttingOptions co;
        co.relax_precondition = true;
        co.decomposition.grid = options.grid;
        const auto cut = arrangement::cutting(family, options.N, options.delta, X, rng, co);
        CuttingTrial& t = out[k];
        t.row = {s, options.N, options.n, cut.max_crossing(), cut.mean_crossing()};
        t.bound = arrangement::crossing_bound(options.n, options.N, options.C);
        t.pass = static_cast<double>(t.row.max_crossing) <= t.bound;
        if (options.regions > 0) t.tail = arrangement::tail_observations(cut, arrangement::reference_regions(rng, options.regions));
    });
    return out;
}

void write_cutting_csv(std::ostream& os, const std::vector<CuttingTrial>& trials) {
    os << "trial,seed,N,n,max_crossing,mean_crossing,bound,pass\n";
    char buf[256];
    for (std::size_t k = 0; k < trials.size(); ++k) {
        const auto& t = trials[k];
        std::snprintf(buf, sizeof buf, "%zu,%llu,%d,%d,%zu,%.17g,%.17g,%d\n", k,
                      static_cast<unsigned long long>(t.row.seed), t.row.N, t.row.n, t.row.max_crossing,
                      t.row.mean_crossing, t.bound, t.pass ? 1 : 0);
        os << buf;
    }
}

std::vector<arrangement::TailObservation> pooled_tail(const std::vector<CuttingTrial>& trials) {
    std::vector<arrangement::TailObservation> out;
    for (const auto& t : trials) out.insert(out.end(), t.tail.begin(), t.tail.end());
    return out;
}

DecomposeStats decompose_experiment(const DecomposeOptions& options, std::uint64_t seed,
                                    arrangement::Decomposition* built) {
    if (options.N < 0 || options.grid < 1 || options.points < 0) throw ConfigError("decompose needs N >= 0 and grid >= 1");
    Rng rng(seed);
    const auto X = geometry::default_window();
    std::vector<TangencySurface> surfaces;
    for (const auto& g : random_circles(rng, options.N, geometry::make_euclidean()))
        surfaces.push_back(arrangement::tangency_surface(g, X, options.delta, rng));
    const auto D = arrangement::vertical_decomposition(std::move(surfaces), {}, {options.grid, 3, 1e-12}, &rng);

    DecomposeStats st;
    st.N = options.N;
    st.cells = D.cells().size();
    st.precells = static_cast<std::size_t>(D.precell_count());
    for (const auto& c : D.cells()) st.max_defining = std::max(st.max_defining, c.defining_surfaces.size());

    const Box2& b = D.box().centers;
    const double r_lo = 1.0 - D.box().tau;
    for (int k = 0; k < options.points; ++k) {
        const Vec2 x(uniform(rng, b.lo.x(), b.hi.x()), uniform(rng, b.lo.y(), b.hi.y()));
        const double r = uniform(rng, r_lo, 1.0);
        const auto label = D.exact_label(x, r);
        int found = -1, count = 0;
        for (const auto& c : D.cells())
            if (D.cell_contains(c, x, label)) found = c.id, ++count;
        const int got = D.locate(x, r);
        ++st.points;
        if (got == arrangement::kBoundary) {
            ++st.boundary;
            if (count != 0) ++st.containment_failures;
        } else if (count != 1 || found != got) {
            ++st.containment_failures;
        }
    }

    if (options.check_crosses) {
        st.crosses_checked = true;
        std::vector<std::size_t> per_cell(D.cells().size(), 0);
        parallel_for(D.cells().size(), options.jobs, [&](std::size_t c) {
            for (const auto& S : D.surfaces())
                if (arrangement::crosses(D, D.cells()[c], S)) ++per_cell[c];
        });
        for (auto v : per_cell) st.crossed += v;
    }
    if (built) *built = D;
    return st;
}

void write_decompose_csv(std::ostream& os, const std::vector<DecomposeStats>& rows) {
    os << "N,cells,precells,max_defining,points,boundary,containment_failures,crossed,crosses_checked\n";
    for (const auto& r : rows)
        os << r.N << ',' << r.cells << ',' << r.precells << ',' << r.max_defining << ',' << r.points << ','
           << r.boundary << ',' << r.containment_failures << ',' << r.crossed << ',' << (r.crosses_checked ? 1 : 0)
           << '\n';
}

bool kst_brute_force(const tangency::IncidenceMatrix& M) {
    const int m = M.rows(), n = M.cols();
    for (int r0 = 0; r0 < m; ++r0)
        for (int r1 = r0 + 1; r1 < m; ++r1) {
            int common = 0;
            for (int j = 0; j < n; ++j)
                if (M.get(r0, j) && M.get(r1, j)) ++common;
            if (common >= 3) return true;
        }
    return false;
}

namespace {

void record(KstScan& scan, const tangency::IncidenceMatrix& M) {
    ++scan.matrices;
    const bool detected = tangency::kst_detect(M).has_value();
    if (detected != kst_brute_force(M)) ++scan.mismatches;
    if (!detected) {
        ++scan.witness_free;
        scan.max_free_ones = std::max(scan.max_free_ones, M.ones());
        scan.max_ratio = std::max(scan.max_ratio, tangency::kst_ratio(M));
    }
}

void merge(KstScan& into, const KstScan& part) {
    into.matrices += part.matrices;
    into.mismatches += part.mismatches;
    into.witness_free += part.witness_free;
    into.max_free_ones = std::max(into.max_free_ones, part.max_free_ones);
    into.max_ratio = std::max(into.max_ratio, part.max_ratio);
}

}  // namespace

KstScan kst_exhaustive(int rows, int cols, unsigned jobs) {
    if (rows < 1 || cols < 1 || rows * cols > 24) throw PreconditionError("exhaustive scan needs 1 <= rows * cols <= 24");
    const int bits = rows * cols;
    const std::uint64_t total = std::uint64_t{1} << bits;
    const std::size_t chunks = 64;
    std::vector<KstScan> parts(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        const std::uint64_t lo = total * c / chunks, hi = total * (c + 1) / chunks;
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            tangency::IncidenceMatrix M(rows, cols);
            for (int b = 0; b < bits; ++b)
                if ((mask >> b) & 1u) M.set(b / cols, b % cols);
            record(parts[c], M);
        }
    });
    KstScan scan;
    scan.rows = rows;
    scan.cols = cols;
    for (const auto& p : parts) merge(scan, p);
    return scan;
}

KstScan kst_random(int rows, int cols, int trials, double p, Rng& rng) {
    if (rows < 1 || cols < 1 || trials < 0 || p < 0.0 || p > 1.0) throw ConfigError("bad randomized kst parameters");
    KstScan scan;
    scan.rows = rows;
    scan.cols = cols;
    std::bernoulli_distribution bit(p);
    for (int k = 0; k < trials; ++k) {
        tangency::IncidenceMatrix M(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if (bit(rng)) M.set(i, j);
        record(scan, M);
    }
    return scan;
}

std::vector<ApolloniusTrial> apollonius_experiment(const ApolloniusOptions& options, std::uint64_t seed) {
    if (options.trials < 1 || !(options.t > 0.0) || !(options.delta > 0.0) || options.candidates < 1)
        throw ConfigError("apollonius needs trials >= 1, t > 0, delta > 0 and candidates >= 1");
    const geometry::Window X(Vec2(0.95, 0.0), 0.5);
    std::vector<ApolloniusTrial> out(options.trials);
    parallel_for(out.size(), options.jobs, [&](std::size_t k) {
        const std::uint64_t s = stream_seed(seed, k);
        Rng rng(s);
        const auto tri = admissible_triple(rng, options.t, X);
        const auto res = tangency::appolonius_probe(tri.circles, options.t, options.delta, X, options.candidates, rng);
        ApolloniusTrial& a = out[k];
        a.trial = static_cast<int>(k);
        a.seed = s;
        a.survivors = res.survivors.size();
        a.clusters = res.clusters.size();
        for (double d : res.diameters) a.max_diameter = std::max(a.max_diameter, d);
        a.insufficient = res.insufficient;
    });
    return out;
}

void write_apollonius_csv(std::ostream& os, const std::vector<ApolloniusTrial>& rows) {
    os << "trial,seed,survivors,clusters,max_diameter,insufficient\n";
    char buf[200];
    for (const auto& a : rows) {
        std::snprintf(buf, sizeof buf, "%d,%llu,%zu,%zu,%.17g,%d\n", a.trial, static_cast<unsigned long long>(a.seed),
                      a.survivors, a.clusters, a.max_diameter, a.insufficient ? 1 : 0);
        os << buf;
    }
}

}  // namespace circmax::harness
