#include "circmax/harness/cli.h"

#include "circmax/arrangement/decomposition.h"
#include "circmax/harness/acceptance.h"
#include "circmax/harness/config.h"
#include "circmax/harness/experiments.h"
#include "circmax/harness/frozen.h"
#include "circmax/harness/manifest.h"
#include "circmax/maximal/maximal.h"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace circmax::harness {

namespace {

namespace fs = std::filesystem;

struct Context {
    Config config;
    std::uint64_t seed = 1;
    fs::path out_dir;
    unsigned jobs = 1;
    std::ostream* out = nullptr;
    RunManifest manifest;
};

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<int> int_list(const Config& c, const std::string& key, const std::vector<int>& fallback) {
    if (!c.has(key)) return fallback;
    std::vector<int> out;
    for (double v : c.get_list(key, {})) {
        if (v != std::floor(v) || v <= 0) throw ConfigError(key + " must list positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

fs::path write_output(Context& ctx, const std::string& name, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(ctx.out_dir);
    const fs::path path = ctx.out_dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    body(f);
    f.close();
    if (!f) throw IoError("write failed: " + path.string());
    ctx.manifest.add_output(path);
    return path;
}

double frozen_or(const Config& c, const std::string& key, double FrozenConstants::*member) {
    if (c.has(key)) return c.positive_double(key, 0.0);
    return load_frozen(c.get_string("frozen.path", default_frozen_path().string())).*member;
}

int cmd_tangency(Context& ctx) {
    const Config& c = ctx.config;
    TangencyCountOptions o;
    if (c.has("tangency.families")) o.families = split_words(c.get_string("tangency.families", ""));
    o.sizes = int_list(c, "tangency.sizes", o.sizes);
    o.seeds = c.positive_int("tangency.seeds", o.seeds);
    o.delta_scale = c.positive_double("tangency.delta_scale", o.delta_scale);
    o.census = c.get_bool("tangency.census", o.census);
    o.census_t = c.positive_double("tangency.census_t", o.census_t);
    o.jobs = ctx.jobs;
    const auto rows = tangency_count(o, ctx.seed);
    write_output(ctx, "tangency_count.csv", [&](std::ostream& os) { write_tangency_csv(os, rows); });
    for (const auto& f : o.families) {
        const double e = tangency_exponent(rows, f);
        ctx.manifest.summary.emplace_back("exponent." + f, e);
        *ctx.out << f << " exponent " << e << '\n';
    }
    for (const auto& r : rows) ctx.manifest.trial_seeds.push_back(r.seed);
    return kExitOk;
}

int cmd_cutting(Context& ctx) {
    const Config& c = ctx.config;
    CuttingExperimentOptions o;
    o.n = c.positive_int("cutting.n", o.n);
    o.N = c.positive_int("cutting.N", o.N);
    o.trials = c.positive_int("cutting.trials", o.trials);
    o.delta = c.positive_double("cutting.delta", o.delta);
    o.grid = c.positive_int("cutting.grid", o.grid);
    o.regions = c.get_int("cutting.regions", o.regions);
    o.C = frozen_or(c, "cutting.C", &FrozenConstants::cutting_C);
    o.jobs = ctx.jobs;
    const auto trials = cutting_experiment(o, ctx.seed);
    write_output(ctx, "cutting.csv", [&](std::ostream& os) { write_cutting_csv(os, trials); });
    const auto tail = pooled_tail(trials);
    write_output(ctx, "cutting_tail.csv", [&](std::ostream& os) {
        os << "lambda,trials,avoided,bound,upper_band,pass\n";
        for (double lambda : c.get_list("cutting.lambdas", {10.0, 20.0, 40.0})) {
            const auto st = arrangement::tail_test(tail, lambda, o.n, o.N);
            os << lambda << ',' << st.trials << ',' << st.avoided << ',' << st.bound << ',' << st.upper_band << ','
               << (st.pass ? 1 : 0) << '\n';
        }
    });
    std::size_t passed = 0;
    for (const auto& t : trials) {
        passed += t.pass;
        ctx.manifest.trial_seeds.push_back(t.row.seed);
    }
    ctx.manifest.summary.emplace_back("passing_trials", static_cast<double>(passed));
    *ctx.out << passed << '/' << trials.size() << " trials within the crossing bound\n";
    return kExitOk;
}

int cmd_decompose(Context& ctx) {
    const Config& c = ctx.config;
    DecomposeOptions o;
    o.N = c.get_int("decompose.N", o.N);
    if (o.N < 0) throw ConfigError("decompose.N must be nonnegative");
    o.delta = c.positive_double("decompose.delta", o.delta);
    o.grid = c.positive_int("decompose.grid", o.grid);
    o.points = c.get_int("decompose.points", 10000);
    o.check_crosses = c.get_bool("decompose.check_crosses", true);
    o.jobs = ctx.jobs;
    arrangement::Decomposition D;
    const auto st = decompose_experiment(o, ctx.seed, &D);
    write_output(ctx, "decompose.csv", [&](std::ostream& os) { write_decompose_csv(os, {st}); });
    write_output(ctx, "cells.csv", [&](std::ostream& os) { arrangement::write_cells_csv(os, D); });
    write_output(ctx, "decomposition.txt", [&](std::ostream& os) { arrangement::write_manifest(os, D); });
    ctx.manifest.summary.emplace_back("cells", static_cast<double>(st.cells));
    ctx.manifest.summary.emplace_back("max_defining", static_cast<double>(st.max_defining));
    ctx.manifest.summary.emplace_back("containment_failures", static_cast<double>(st.containment_failures));
    ctx.manifest.summary.emplace_back("crossed", static_cast<double>(st.crossed));
    *ctx.out << st.cells << " cells\n";
    return kExitOk;
}

int cmd_kst(Context& ctx) {
    const Config& c = ctx.config;
    const int rows = c.positive_int("kst.rows", 4), cols = c.positive_int("kst.cols", 5);
    const int random_trials = c.get_int("kst.random_trials", 0);
    std::vector<KstScan> scans{kst_exhaustive(rows, cols, ctx.jobs)};
    if (random_trials > 0) {
        Rng rng(ctx.seed);
        scans.push_back(kst_random(c.positive_int("kst.random_rows", 40), c.positive_int("kst.random_cols", 60),
                                   random_trials, c.get_double("kst.density", 0.1), rng));
    }
    write_output(ctx, "kst.csv", [&](std::ostream& os) {
        os << "mode,rows,cols,matrices,mismatches,witness_free,max_free_ones,max_ratio\n";
        for (std::size_t k = 0; k < scans.size(); ++k) {
            const auto& s = scans[k];
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", s.max_ratio);
            os << (k == 0 ? "exhaustive" : "random") << ',' << s.rows << ',' << s.cols << ',' << s.matrices << ','
               << s.mismatches << ',' << s.witness_free << ',' << s.max_free_ones << ',' << buf << '\n';
        }
    });
    ctx.manifest.summary.emplace_back("mismatches", static_cast<double>(scans[0].mismatches));
    ctx.manifest.summary.emplace_back("max_ratio", scans[0].max_ratio);
    *ctx.out << scans[0].matrices << " matrices, " << scans[0].mismatches << " mismatches\n";
    return kExitOk;
}

int cmd_maximal(Context& ctx) {
    const Config& c = ctx.config;
    const int res = c.positive_int("maximal.resolution", maximal::kDefaultResolution);
    const maximal::Grid G{res, res, maximal::default_domain()};
    std::vector<double> deltas = c.get_list("maximal.deltas", {});
    if (deltas.empty())
        for (int e = 4; e <= 8; ++e) deltas.push_back(std::ldexp(1.0, -e));
    maximal::ScalingConfig sc;
    sc.radii = c.positive_int("maximal.radii", sc.radii);
    sc.maximal.jobs = ctx.jobs;
    const std::string corpus = c.get_string("maximal.corpus", "bush");
    maximal::ScalingReport rep;
    if (corpus == "bush") {
        rep = maximal::scaling_experiment([&](double d) { return maximal::annulus_bush(G, d); }, deltas, sc);
    } else if (corpus == "fixed-bush") {
        rep = maximal::scaling_experiment(maximal::annulus_bush(G, c.positive_double("maximal.width", deltas.back())),
                                          deltas, sc);
    } else if (corpus == "blobs") {
        Rng rng(ctx.seed);
        rep = maximal::scaling_experiment(maximal::random_blobs(G, rng, 12, 0.01, 0.2), deltas, sc);
    } else {
        throw ConfigError("unknown maximal.corpus '" + corpus + "'");
    }
    write_output(ctx, "scaling.json", [&](std::ostream& os) { maximal::write_report(os, rep); });
    write_output(ctx, "scaling.csv", [&](std::ostream& os) {
        os << "delta,ratio\n";
        char buf[96];
        for (std::size_t k = 0; k < rep.deltas.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rep.deltas[k], rep.ratios[k]);
            os << buf;
        }
    });
    ctx.manifest.summary.emplace_back("slope", rep.slope);
    *ctx.out << "slope " << rep.slope << '\n';
    return kExitOk;
}

int cmd_apollonius(Context& ctx) {
    const Config& c = ctx.config;
    ApolloniusOptions o;
    o.trials = c.positive_int("apollonius.trials", o.trials);
    o.t = c.positive_double("apollonius.t", o.t);
    o.delta = c.positive_double("apollonius.delta", o.delta);
    o.candidates = static_cast<std::size_t>(c.positive_int("apollonius.candidates", static_cast<int>(o.candidates)));
    o.jobs = ctx.jobs;
    const auto rows = apollonius_experiment(o, ctx.seed);
    write_output(ctx, "apollonius.csv", [&](std::ostream& os) { write_apollonius_csv(os, rows); });
    std::size_t most = 0;
    for (const auto& r : rows) {
        most = std::max(most, r.clusters);
        ctx.manifest.trial_seeds.push_back(r.seed);
    }
    ctx.manifest.summary.emplace_back("max_clusters", static_cast<double>(most));
    *ctx.out << "max clusters " << most << '\n';
    return kExitOk;
}

int cmd_calibrate(Context& ctx) {
    CalibrationOptions o;
    o.seed = ctx.config.get_u64("calibrate.seed", kCalibrationSeed);
    o.jobs = ctx.jobs;
    const FrozenConstants k = calibrate(o, ctx.out);
    const fs::path target = ctx.config.get_string("frozen.path", default_frozen_path().string());
    save_frozen(k, target);
    fs::create_directories(ctx.out_dir);
    fs::copy_file(target, ctx.out_dir / "frozen_constants.cfg", fs::copy_options::overwrite_existing);
    ctx.manifest.add_output(ctx.out_dir / "frozen_constants.cfg");
    ctx.manifest.seed = o.seed;
    *ctx.out << "wrote " << target.string() << '\n';
    return kExitOk;
}

int cmd_accept(Context& ctx, const std::vector<int>& only) {
    const FrozenConstants k = load_frozen(ctx.config.get_string("frozen.path", default_frozen_path().string()));
    AcceptanceOptions o;
    o.seed = ctx.config.get_u64("accept.seed", kAcceptanceSeed);
    o.jobs = ctx.jobs;
    const auto results = run_acceptance(k, o, only, [&](const CriterionResult& r) { *ctx.out << format_result(r) << std::endl; });
    write_output(ctx, "acceptance.csv", [&](std::ostream& os) { write_acceptance_csv(os, results); });
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.pass;
    *ctx.out << passed << '/' << results.size() << " criteria passed\n";
    ctx.manifest.seed = o.seed;
    ctx.manifest.summary.emplace_back("passed", static_cast<double>(passed));
    ctx.manifest.summary.emplace_back("criteria", static_cast<double>(results.size()));
    return passed == results.size() ? kExitOk : kExitAcceptanceFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Circular maximal function and tangency experiments", "circmax"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "circmax_out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::vector<std::string> overrides;
    std::vector<int> only;
    app.add_option("--config", config_path, "Configuration file (key = value with [sections])");
    app.add_option("--seed", seed, "Base seed; overrides run.seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "Override a config value: section.key=value");

    const std::vector<std::pair<const char*, const char*>> names{
        {"tangency-count", "Near-tangency counts over N for several families"},
        {"cutting", "Crossing statistics of random cuttings over seeds"},
        {"decompose", "Build and verify a vertical decomposition"},
        {"kst", "Forbidden 2 x 3 submatrix suite"},
        {"maximal-scaling", "Scaling report of the circular maximal function"},
        {"apollonius", "Y-set probe on admissible triples"},
        {"calibrate", "Measure and freeze the constant table"},
        {"accept", "Run the acceptance suite"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : names) subs[name] = app.add_subcommand(name, help);
    subs["accept"]->add_option("--only", only, "Criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "circmax: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        Context ctx;
        if (!config_path.empty()) ctx.config = Config::load(config_path);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--set needs section.key=value, got '" + o + "'");
            ctx.config.set(o.substr(0, eq), o.substr(eq + 1));
        }
        ctx.seed = seed ? *seed : ctx.config.get_u64("run.seed", 1);
        ctx.config.set("run.seed", std::to_string(ctx.seed));
        ctx.out_dir = out_dir;
        ctx.jobs = jobs;
        ctx.out = &out;
        ctx.manifest.seed = ctx.seed;

        std::string name;
        for (const auto& [n, s] : subs)
            if (s->parsed()) name = n;
        ctx.manifest.subcommand = name;
        int code = kExitOk;
        if (name == "tangency-count") code = cmd_tangency(ctx);
        else if (name == "cutting") code = cmd_cutting(ctx);
        else if (name == "decompose") code = cmd_decompose(ctx);
        else if (name == "kst") code = cmd_kst(ctx);
        else if (name == "maximal-scaling") code = cmd_maximal(ctx);
        else if (name == "apollonius") code = cmd_apollonius(ctx);
        else if (name == "calibrate") code = cmd_calibrate(ctx);
        else if (name == "accept") code = cmd_accept(ctx, only);
        ctx.manifest.config = ctx.config;
        ctx.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ctx.manifest.write(ctx.out_dir);
        return code;
    } catch (const Error& e) {
        err << "circmax: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "circmax: " << e.what() << '\n';
        return kExitUnexpected;
    }
}

}  // namespace circmax::harness
