#include "circmax/harness/acceptance.h"

#include "circmax/common/error.h"
#include "circmax/common/parallel.h"
#include "circmax/geometry/delta.h"
#include "circmax/geometry/overlap.h"
#include "circmax/harness/experiments.h"
#include "circmax/harness/families.h"
#include "circmax/maximal/multiplicity.h"
#include "circmax/tangency/census.h"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <ostream>

namespace circmax::harness {

namespace {

using geometry::Window;

constexpr double kAreaDelta = 1e-3;
constexpr std::size_t kAreaSamples = 20000;
constexpr double kCensusT = 0.04;
constexpr double kCensusDelta = 5e-5;
constexpr double kMaximalDelta = 1.0 / 32;
constexpr double kMaximalTolerance = 1e-12;
constexpr double kBushSlope = 0.2;
constexpr double kMultiplicityDelta = 1e-3;
constexpr double kMultiplicitySpacing = 1.001e-3;
constexpr double kMultiplicityTau = 0.25;
constexpr double kEta = 0.1;
constexpr double kLambda = 0.1;

std::string fmt(const char* format, ...) {
    char buf[1024];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

Rng criterion_stream(std::uint64_t seed, int id) { return make_stream(seed, static_cast<std::uint64_t>(id)); }

// Overlap area against delta^2 / sqrt((d + delta)(Delta + delta)).
struct AreaSample {
    double estimate = 0.0;
    double std_error = 0.0;
    double scale = 0.0;
};

std::vector<AreaSample> area_corpus(std::uint64_t seed, int pairs, unsigned jobs) {
    std::vector<AreaSample> out(pairs);
    const Window X = geometry::default_window();
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        Rng rng = make_stream(seed, k);
        std::pair<PhiCircle, PhiCircle> gh = [&] {
            if (k % 2 == 0) {
                const double t = 0.005 * std::pow(10.0, uniform(rng, 0.0, 1.0));
                return tangent_pair(rng, t, X);
            }
            const auto c = random_circles(rng, 2, geometry::make_euclidean());
            return std::pair<PhiCircle, PhiCircle>{c[0], c[1]};
        }();
        const auto& [g, h] = gh;
        const auto est = geometry::annulus_overlap_area(g, h, kAreaDelta, X, kAreaSamples, rng);
        const double d = geometry::metric_d(g, h), D = geometry::delta_fast(g, h, X);
        out[k] = {est.estimate, est.std_error,
                  kAreaDelta * kAreaDelta / std::sqrt((d + kAreaDelta) * (D + kAreaDelta))};
    });
    return out;
}

std::vector<std::size_t> tangent_pair_census(std::uint64_t seed, int pairs, unsigned jobs) {
    std::vector<std::size_t> out(pairs);
    const Window X = geometry::default_window();
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        Rng rng = make_stream(seed, k);
        const auto [w, b] = tangent_pair(rng, kCensusT, X);
        const tangency::BipartitePair P{{w}, {b}, kCensusT, kCensusDelta};
        out[k] = tangency::count_type(tangency::rect_census(P, X), 1, 1);
    });
    return out;
}

// Census count and the bound shape (mn)^0.1 ((mn)^0.75 + m log n + n log m).
struct BipartiteSample {
    int m = 0;
    int n = 0;
    std::size_t count = 0;
    double shape = 0.0;
};

std::vector<BipartiteSample> bipartite_corpus(std::uint64_t seed, int pairs, unsigned jobs) {
    std::vector<BipartiteSample> out(pairs);
    const Window X = geometry::default_window();
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        Rng rng = make_stream(seed, k);
        std::uniform_int_distribution<int> size(20, 200);
        const int m = size(rng), n = size(rng);
        const auto P = random_bipartite(rng, m, n, kCensusT, kCensusDelta, geometry::make_euclidean());
        const double mn = static_cast<double>(m) * n;
        out[k] = {m, n, tangency::count_type(tangency::rect_census(P, X), 1, 1),
                  std::pow(mn, 0.1) * (std::pow(mn, 0.75) + m * std::log(n) + n * std::log(m))};
    });
    return out;
}

CuttingExperimentOptions cutting_options(double C, int trials, unsigned jobs) {
    CuttingExperimentOptions o;
    o.C = C;
    o.trials = trials;
    o.jobs = jobs;
    return o;
}

maximal::Grid maximal_grid() { return {maximal::kDefaultResolution, maximal::kDefaultResolution, maximal::default_domain()}; }

std::vector<maximal::GridFunction> random_corpus(Rng& rng, int count) {
    std::vector<maximal::GridFunction> out;
    for (int k = 0; k < count; ++k) out.push_back(maximal::random_blobs(maximal_grid(), rng, 12, 0.01, 0.2));
    return out;
}

double multiplicity_fraction(std::uint64_t seed) {
    Rng rng(seed);
    const auto A = maximal::separated_circles(rng, 200, kMultiplicitySpacing, kMultiplicityTau, geometry::make_euclidean());
    maximal::MultiplicityOptions o;
    o.tau = kMultiplicityTau;
    return maximal::multiplicity_check(A, kMultiplicityDelta, kEta, kLambda, geometry::default_window().shrunk(), o)
        .flagged_fraction();
}

// Criteria.

CriterionResult closed_form(const FrozenConstants&, const AcceptanceOptions& o) {
    Rng rng = criterion_stream(o.seed, 1);
    const Window big(Vec2::Zero(), 3.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto c = random_circles(rng, 2, geometry::make_euclidean());
        worst = std::max(worst, std::abs(geometry::delta(c[0], c[1], big) - geometry::delta_closed_form(c[0], c[1])));
    }
    return {1, "closed-form Delta agreement", worst <= 1e-4, 0, 5, fmt("max |error| %.3g over 1000 pairs (tol 1e-4)", worst)};
}

CriterionResult overlap_area(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto corpus = area_corpus(stream_seed(o.seed, 2), 500, o.jobs);
    int violations = 0;
    double worst = 0.0;
    for (const auto& s : corpus) {
        if (s.estimate - 3.0 * s.std_error > k.area_C * s.scale) ++violations;
        worst = std::max(worst, s.estimate / s.scale);
    }
    return {2, "overlap-area bound", violations == 0, 0, 60,
            fmt("%d violations in 500 pairs; max area/scale %.4g vs C* %.4g", violations, worst, k.area_C)};
}

CriterionResult incomparable_census(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto counts = tangent_pair_census(stream_seed(o.seed, 3), 200, o.jobs);
    const std::size_t worst = *std::max_element(counts.begin(), counts.end());
    return {3, "incomparable rectangles per tangent pair", static_cast<double>(worst) <= k.K_inc, 0, 60,
            fmt("max %zu over 200 pairs vs K_inc %.0f", worst, k.K_inc)};
}

CriterionResult tangency_scaling(const FrozenConstants&, const AcceptanceOptions& o) {
    TangencyCountOptions to;
    to.jobs = o.jobs;
    const auto rows = tangency_count(to, stream_seed(o.seed, 4));
    bool pass = true;
    std::string detail;
    for (const auto& f : to.families) {
        const double e = tangency_exponent(rows, f);
        pass = pass && e <= 1.6;
        detail += fmt("%s%s %.3f", detail.empty() ? "exponents: " : ", ", f.c_str(), e);
    }
    return {4, "tangency-count scaling", pass, 0, 600, detail + " (limit 1.6)"};
}

CriterionResult bipartite_census(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto corpus = bipartite_corpus(stream_seed(o.seed, 5), 50, o.jobs);
    int violations = 0;
    double worst = 0.0;
    for (const auto& s : corpus) {
        if (static_cast<double>(s.count) > k.C_eps * s.shape) ++violations;
        worst = std::max(worst, static_cast<double>(s.count) / s.shape);
    }
    return {5, "bipartite census bound", violations == 0, 0, 600,
            fmt("%d violations in 50 pairs; max count/shape %.4g vs C_eps %.4g", violations, worst, k.C_eps)};
}

CriterionResult decomposition_soundness(const FrozenConstants&, const AcceptanceOptions& o) {
    std::vector<double> Ns, cells;
    std::size_t failures = 0, crossed = 0, max_defining = 0;
    for (int N = 2; N <= 24; ++N) {
        DecomposeOptions d;
        d.N = N;
        d.jobs = o.jobs;
        const auto st = decompose_experiment(d, stream_seed(stream_seed(o.seed, 6), N));
        failures += st.containment_failures;
        crossed += st.crossed;
        max_defining = std::max(max_defining, st.max_defining);
        Ns.push_back(N);
        cells.push_back(static_cast<double>(st.cells));
    }
    const double slope = loglog_slope(Ns, cells);
    const bool pass = failures == 0 && crossed == 0 && max_defining <= 6 && slope <= 3.2;
    return {6, "decomposition soundness", pass, 0, 300,
            fmt("containment failures %zu, crossed pairs %zu, max defining %zu, cell exponent %.3f (limit 3.2)", failures,
                crossed, max_defining, slope)};
}

CriterionResult cutting_concentration(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto trials = cutting_experiment(cutting_options(k.cutting_C, 100, o.jobs), stream_seed(o.seed, 7));
    const auto passed = std::count_if(trials.begin(), trials.end(), [](const CuttingTrial& t) { return t.pass; });
    const auto tail = pooled_tail(trials);
    bool tail_ok = true;
    std::string tail_detail;
    for (double lambda : {10.0, 20.0, 40.0}) {
        const auto st = arrangement::tail_test(tail, lambda, 500, 50);
        tail_ok = tail_ok && st.pass;
        tail_detail += fmt("; lambda %.0f: %zu/%zu avoided, band %zu", lambda, st.avoided, st.trials, st.upper_band);
    }
    return {7, "cutting concentration", passed >= 95 && tail_ok, 0, 900,
            fmt("%ld/100 seeds within C (n/N) log n, C %.4g", static_cast<long>(passed), k.cutting_C) + tail_detail};
}

CriterionResult kst_suite(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto scan = kst_exhaustive(4, 5, o.jobs);
    const bool pass = scan.matrices == (1u << 20) && scan.mismatches == 0 && scan.max_ratio <= k.C_kst;
    return {8, "forbidden-submatrix suite", pass, 0, 300,
            fmt("%llu matrices, %llu mismatches, %llu witness-free, max ratio %.6g vs C_kst %.6g",
                static_cast<unsigned long long>(scan.matrices), static_cast<unsigned long long>(scan.mismatches),
                static_cast<unsigned long long>(scan.witness_free), scan.max_ratio, k.C_kst)};
}

CriterionResult maximal_properties(const FrozenConstants& k, const AcceptanceOptions& o) {
    const auto G = maximal_grid();
    const auto radii = maximal::radius_grid();
    maximal::MaximalOptions mo;
    mo.jobs = o.jobs;
    const auto ones = maximal::maximal_transform(maximal::GridFunction(G, 1.0), kMaximalDelta, radii, mo);
    const bool unit = std::all_of(ones.begin(), ones.end(), [](double v) { return v == 1.0; });

    Rng rng = criterion_stream(o.seed, 9);
    const auto fs = random_corpus(rng, 20), gs = random_corpus(rng, 20);
    int sub_fail = 0, mono_fail = 0, trivial_fail = 0;
    double worst_trivial = 0.0;
    for (int p = 0; p < 20; ++p) {
        const auto Mf = maximal::maximal_transform(fs[p], kMaximalDelta, radii, mo);
        const auto Mg = maximal::maximal_transform(gs[p], kMaximalDelta, radii, mo);
        const auto Ms = maximal::maximal_transform(fs[p] + gs[p], kMaximalDelta, radii, mo);
        for (std::size_t r = 0; r < radii.size(); ++r) {
            if (Ms[r] > (Mf[r] + Mg[r]) * (1.0 + kMaximalTolerance)) ++sub_fail;
            if (Mf[r] > Ms[r] * (1.0 + kMaximalTolerance) || Mg[r] > Ms[r] * (1.0 + kMaximalTolerance)) ++mono_fail;
        }
        double sup = 0.0;
        for (double v : Mf) sup = std::max(sup, v);
        const double ratio = sup * kMaximalDelta / fs[p].integral();
        worst_trivial = std::max(worst_trivial, ratio);
        if (ratio > k.maximal_trivial_C) ++trivial_fail;
    }

    std::vector<double> deltas;
    for (int e = 4; e <= 8; ++e) deltas.push_back(std::ldexp(1.0, -e));
    maximal::ScalingConfig sc;
    sc.maximal.jobs = o.jobs;
    const auto rep = maximal::scaling_experiment([&](double d) { return maximal::annulus_bush(G, d); }, deltas, sc);

    const bool pass = unit && sub_fail == 0 && mono_fail == 0 && trivial_fail == 0 && rep.slope <= kBushSlope;
    return {9, "maximal-function properties", pass, 0, 600,
            fmt("M1 == 1: %s; sublinearity failures %d, monotonicity failures %d; trivial ratio max %.4g vs C %.4g; "
                "bush slope %.4f (limit 0.2)",
                unit ? "yes" : "no", sub_fail, mono_fail, worst_trivial, k.maximal_trivial_C, rep.slope)};
}

CriterionResult multiplicity(const FrozenConstants& k, const AcceptanceOptions& o) {
    const double f = multiplicity_fraction(stream_seed(o.seed, 10));
    const double limit = 1.0 - 1.0 / k.multiplicity_C;
    return {10, "multiplicity check", f <= limit, 0, 300,
            fmt("flagged fraction %.4f vs 1 - 1/C = %.4f (C %.4g)", f, limit, k.multiplicity_C)};
}

CriterionResult apollonius(const FrozenConstants& k, const AcceptanceOptions& o) {
    ApolloniusOptions ao;
    ao.jobs = o.jobs;
    const auto trials = apollonius_experiment(ao, stream_seed(o.seed, 11));
    std::size_t most = 0, insufficient = 0;
    double worst = 0.0;
    for (const auto& t : trials) {
        most = std::max(most, t.clusters);
        worst = std::max(worst, t.max_diameter / ao.t);
        insufficient += t.insufficient;
    }
    const bool pass = most <= 2 && worst <= k.apollonius_C;
    return {11, "Apollonius probe", pass, 0, 300,
            fmt("max clusters %zu (limit 2), max diameter/t %.4g vs C %.4g, %zu sparse trials", most, worst,
                k.apollonius_C, insufficient)};
}

using Criterion = CriterionResult (*)(const FrozenConstants&, const AcceptanceOptions&);
constexpr Criterion kCriteria[kCriterionCount] = {closed_form,      overlap_area,        incomparable_census,
                                                  tangency_scaling, bipartite_census,    decomposition_soundness,
                                                  cutting_concentration, kst_suite,      maximal_properties,
                                                  multiplicity,     apollonius};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CriterionResult run_criterion(int id, const FrozenConstants& k, const AcceptanceOptions& options) {
    if (id < 1 || id > kCriterionCount) throw ConfigError("no acceptance criterion " + std::to_string(id));
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = kCriteria[id - 1](k, options);
    r.seconds = seconds_since(t0);
    if (r.seconds > r.limit_seconds) {
        r.pass = false;
        r.detail += "; over the time limit";
    }
    return r;
}

std::vector<CriterionResult> run_acceptance(const FrozenConstants& k, const AcceptanceOptions& options,
                                            const std::vector<int>& only,
                                            const std::function<void(const CriterionResult&)>& report) {
    std::vector<int> ids = only;
    if (ids.empty())
        for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, k, options));
        if (report) report(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    return fmt("[%s] %2d %s: ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail +
           fmt(" (%.1f s, limit %.0f s)", r.seconds, r.limit_seconds);
}

void write_acceptance_csv(std::ostream& os, const std::vector<CriterionResult>& results) {
    os << "id,name,pass,seconds,limit_seconds,detail\n";
    for (const auto& r : results) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        os << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << ',' << fmt("%.3f", r.seconds) << ','
           << r.limit_seconds << ",\"" << detail << "\"\n";
    }
}

FrozenConstants calibrate(const CalibrationOptions& options, std::ostream* log) {
    auto note = [&](const std::string& s) {
        if (log) *log << s << std::endl;
    };
    const std::uint64_t seed = options.seed;
    FrozenConstants k;
    k.corpus = fmt("calibration-%llx", static_cast<unsigned long long>(seed));

    double area = 0.0;
    for (const auto& s : area_corpus(stream_seed(seed, 2), 500, options.jobs)) area = std::max(area, s.estimate / s.scale);
    k.area_C = 1.25 * area;
    note(fmt("area_C: max area/scale %.6g", area));

    std::size_t inc = 0;
    for (auto c : tangent_pair_census(stream_seed(seed, 3), 400, options.jobs)) inc = std::max(inc, c);
    k.K_inc = static_cast<double>(inc);
    note(fmt("K_inc: max incomparable rectangles %zu", inc));

    double eps = 0.0;
    for (const auto& s : bipartite_corpus(stream_seed(seed, 5), 50, options.jobs))
        eps = std::max(eps, static_cast<double>(s.count) / s.shape);
    k.C_eps = 1.25 * eps;
    note(fmt("C_eps: max count/shape %.6g", eps));

    double cells = 0.0;
    for (int N : {4, 8, 16, 24}) {
        DecomposeOptions d;
        d.N = N;
        d.points = 0;
        d.check_crosses = false;
        const auto st = decompose_experiment(d, stream_seed(stream_seed(seed, 6), N));
        cells = std::max(cells, static_cast<double>(st.cells) / arrangement::cell_count_bound(N, 1.0));
    }
    k.cell_C = 1.25 * cells;
    note(fmt("cell_C: max cells / (N^3 log(N + 2)) %.6g", cells));

    double cut = 0.0;
    for (const auto& t : cutting_experiment(cutting_options(1.0, 20, options.jobs), stream_seed(seed, 7)))
        cut = std::max(cut, static_cast<double>(t.row.max_crossing) / t.bound);
    k.cutting_C = 1.15 * cut;
    note(fmt("cutting_C: max crossing / ((n/N) log n) %.6g", cut));

    const auto scan = kst_exhaustive(4, 5, options.jobs);
    k.C_kst = scan.max_ratio;
    note(fmt("C_kst: 4 x 5 scan max ratio %.17g", scan.max_ratio));

    Rng rng = make_stream(seed, 9);
    double trivial = 0.0;
    maximal::MaximalOptions mo;
    mo.jobs = options.jobs;
    auto corpus = random_corpus(rng, 20);
    for (double r : {maximal::radius_grid().front(), 0.75, maximal::radius_grid().back()})
        corpus.push_back(maximal::annulus_indicator(maximal_grid(), PhiCircle(geometry::make_euclidean(), Vec2::Zero(), r),
                                                    kMaximalDelta));
    for (const auto& f : corpus)
        trivial = std::max(trivial, maximal::trivial_ratio(f, kMaximalDelta, maximal::radius_grid(), mo));
    k.maximal_trivial_C = 1.1 * trivial;
    note(fmt("maximal_trivial_C: max ||Mf||_inf delta / ||f||_1 %.6g", trivial));

    double flagged = 0.0;
    for (int s = 0; s < 5; ++s) flagged = std::max(flagged, multiplicity_fraction(stream_seed(stream_seed(seed, 10), s)));
    const double allowed = std::min(0.99, std::max(0.05, 1.25 * flagged));
    k.multiplicity_C = 1.0 / (1.0 - allowed);
    note(fmt("multiplicity_C: max flagged fraction %.6g, allowed %.6g", flagged, allowed));

    ApolloniusOptions ao;
    ao.jobs = options.jobs;
    double diam = 0.0;
    for (const auto& t : apollonius_experiment(ao, stream_seed(seed, 11))) diam = std::max(diam, t.max_diameter / ao.t);
    k.apollonius_C = 1.25 * diam;
    note(fmt("apollonius_C: max diameter/t %.6g", diam));

    k.frozen = true;
    return k;
}

}  // namespace circmax::harness
