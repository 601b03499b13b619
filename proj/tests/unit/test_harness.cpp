#include "circmax/common/error.h"
#include "circmax/harness/acceptance.h"
#include "circmax/harness/cli.h"
#include "circmax/harness/config.h"
#include "circmax/harness/experiments.h"
#include "circmax/harness/frozen.h"
#include "circmax/harness/manifest.h"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace circmax;
using namespace circmax::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("circmax_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "circmax");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse(
        "# comment\nname = demo\n[cutting]\nn = 500\nN=50\ndelta = 1e-3\n; other comment\n[maximal]\ndeltas = 0.5, 0.25\n"
        "flag = true\n");
    CHECK(c.get_string("name", "") == "demo");
    CHECK(c.get_int("cutting.n", 0) == 500);
    CHECK(c.get_int("cutting.N", 0) == 50);
    CHECK(c.get_double("cutting.delta", 0) == 1e-3);
    CHECK(c.get_list("maximal.deltas", {}) == std::vector<double>{0.5, 0.25});
    CHECK(c.get_bool("maximal.flag", false));
    CHECK(c.get_int("missing", 7) == 7);
    CHECK_THROWS_AS(c.get_int("cutting.delta", 0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("cutting.n", false), ConfigError);
    CHECK_THROWS_AS(Config::parse("novalue\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[open\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[s]\nx = -1\n").positive_double("s.x", 1.0), ConfigError);

    const auto again = Config::parse(c.dump());
    CHECK(again.values() == c.values());
}

TEST_CASE("frozen table round trip and refusal when unfrozen") {
    const auto dir = scratch("frozen");
    FrozenConstants k;
    k.corpus = "unit";
    k.area_C = 7.5;
    k.K_inc = 4;
    k.C_eps = 0.1;
    k.C_kst = 1.25;
    k.cutting_C = 1.5;
    k.cell_C = 0.5;
    k.maximal_trivial_C = 0.05;
    k.multiplicity_C = 1.1;
    k.apollonius_C = 0.03;
    save_frozen(k, dir / "unfrozen.cfg");
    CHECK_THROWS_AS(load_frozen(dir / "unfrozen.cfg"), ConfigError);
    CHECK_THROWS_AS(load_frozen(dir / "absent.cfg"), ConfigError);

    k.frozen = true;
    save_frozen(k, dir / "frozen.cfg");
    const auto back = load_frozen(dir / "frozen.cfg");
    CHECK(back.frozen);
    CHECK(back.corpus == "unit");
    CHECK(back.area_C == 7.5);
    CHECK(back.C_kst == 1.25);
    CHECK(back.multiplicity_C == 1.1);

    k.apollonius_C = 0.0;
    save_frozen(k, dir / "zero.cfg");
    CHECK_THROWS_AS(load_frozen(dir / "zero.cfg"), ConfigError);

    // The shipped table is frozen.
    CHECK(load_frozen().frozen);
}

TEST_CASE("subcommands refuse an unfrozen table") {
    const auto dir = scratch("refuse");
    FrozenConstants k;
    save_frozen(k, dir / "table.cfg");
    std::string text;
    const int code = cli({"--out", (dir / "out").string(), "--set", "frozen.path=" + (dir / "table.cfg").string(),
                          "--set", "cutting.trials=1", "cutting"},
                         &text);
    CHECK(code == exit_code(ErrorKind::config));
}

TEST_CASE("sha256 digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto dir = scratch("sha");
    std::ofstream(dir / "f.txt") << "abc";
    CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
    CHECK_THROWS_AS(sha256_file(dir / "missing"), IoError);
}

TEST_CASE("decompose with N = 0 reports one cell and digests every output") {
    const auto dir = scratch("decompose0");
    const int code = cli({"--out", dir.string(), "--set", "decompose.N=0", "--set", "decompose.grid=16", "decompose"});
    REQUIRE(code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(j["summary"]["cells"] == 1.0);
    CHECK(j["subcommand"] == "decompose");
    CHECK(j["version"] == kVersion);
    CHECK(j["config"]["run.seed"] == "1");
    REQUIRE(j["outputs"].size() == 3);
    for (const auto& o : j["outputs"]) CHECK(o["sha256"] == sha256_file(dir / o["file"].get<std::string>()));
}

TEST_CASE("cutting CSV has one row per trial and a pass column") {
    const auto dir = scratch("cutting");
    const int code = cli({"--out", dir.string(), "--seed", "5", "--set", "cutting.n=60", "--set", "cutting.N=6",
                          "--set", "cutting.trials=3", "--set", "cutting.grid=24", "--set", "cutting.regions=10",
                          "cutting"});
    REQUIRE(code == kExitOk);
    const auto lines = csv_lines(slurp(dir / "cutting.csv"));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "trial,seed,N,n,max_crossing,mean_crossing,bound,pass");
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const char last = lines[k].back();
        CHECK((last == '0' || last == '1'));
    }
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const std::vector<std::string> args{"--seed", "11", "--set", "tangency.sizes=16,32", "--set", "tangency.seeds=2",
                                        "--set", "tangency.census=true", "tangency-count"};
    auto with_out = [&](const fs::path& dir, std::vector<std::string> extra) {
        extra.insert(extra.begin(), {"--out", dir.string()});
        return extra;
    };
    REQUIRE(cli(with_out(a, args)) == kExitOk);
    REQUIRE(cli(with_out(b, args)) == kExitOk);
    CHECK(slurp(a / "tangency_count.csv") == slurp(b / "tangency_count.csv"));
    auto other = args;
    other[1] = "12";
    REQUIRE(cli(with_out(c, other)) == kExitOk);
    CHECK(slurp(a / "tangency_count.csv") != slurp(c / "tangency_count.csv"));

    const auto p = scratch("det_p"), q = scratch("det_q");
    const std::vector<std::string> ap{"--seed", "3", "--set", "apollonius.trials=2", "--set",
                                      "apollonius.candidates=500", "--jobs", "2", "apollonius"};
    REQUIRE(cli(with_out(p, ap)) == kExitOk);
    auto serial = ap;
    serial[7] = "1";
    REQUIRE(cli(with_out(q, serial)) == kExitOk);
    CHECK(slurp(p / "apollonius.csv") == slurp(q / "apollonius.csv"));
}

TEST_CASE("exit codes") {
    CHECK(cli({"frobnicate"}) == kExitUsage);
    CHECK(cli({}) == kExitUsage);
    CHECK(cli({"--jobs", "0", "kst"}) == kExitUsage);
    const auto dir = scratch("codes");
    CHECK(cli({"--out", dir.string(), "--config", (dir / "none.cfg").string(), "kst"}) == exit_code(ErrorKind::io));
    CHECK(cli({"--out", dir.string(), "--set", "decompose.grid=-3", "decompose"}) == exit_code(ErrorKind::config));
    CHECK(cli({"--out", dir.string(), "--set", "tangency.families=spiral", "tangency-count"}) ==
          exit_code(ErrorKind::config));
    CHECK(cli({"--out", dir.string(), "--set", "maximal.resolution=64", "--set", "maximal.deltas=0.01",
               "maximal-scaling"}) == exit_code(ErrorKind::resolution));
    CHECK(cli({"--out", dir.string(), "--set", "noequals", "kst"}) == exit_code(ErrorKind::config));
}

TEST_CASE("kst subcommand scans a small shape exhaustively") {
    const auto dir = scratch("kst");
    REQUIRE(cli({"--out", dir.string(), "--set", "kst.rows=3", "--set", "kst.cols=4", "--set", "kst.random_trials=50",
                 "kst"}) == kExitOk);
    const auto lines = csv_lines(slurp(dir / "kst.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].rfind("exhaustive,3,4,4096,0,", 0) == 0);
    CHECK(lines[2].rfind("random,40,60,50,0,", 0) == 0);
}

TEST_CASE("kst brute force agrees with the witness search on a 3 x 4 scan") {
    const auto scan = kst_exhaustive(3, 4);
    CHECK(scan.matrices == 4096);
    CHECK(scan.mismatches == 0);
    // Oracle: a 3 x 4 matrix is witness-free unless two rows share three columns.
    std::uint64_t free = 0;
    for (unsigned mask = 0; mask < 4096; ++mask) {
        unsigned row[3] = {mask & 15u, (mask >> 4) & 15u, (mask >> 8) & 15u};
        bool witness = false;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (__builtin_popcount(row[a] & row[b]) >= 3) witness = true;
        free += !witness;
    }
    CHECK(scan.witness_free == free);
}

TEST_CASE("maximal-scaling on a flat function has zero slope") {
    const auto dir = scratch("maximal");
    REQUIRE(cli({"--out", dir.string(), "--set", "maximal.resolution=128", "--set", "maximal.deltas=0.125,0.0625",
                 "--set", "maximal.radii=8", "--set", "maximal.corpus=bush", "maximal-scaling"}) == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "scaling.json"));
    CHECK(j["deltas"].size() == 2);
    CHECK(j.contains("slope"));
    CHECK(j.contains("residual"));
}

TEST_CASE("loglog slope and family helpers") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), PreconditionError);
    CHECK_THROWS_AS(loglog_slope({1, 2}, {0, 1}), PreconditionError);
    Rng rng(1);
    CHECK_THROWS_AS(make_family("spiral", 4, rng), ConfigError);
    // A pencil is pairwise tangent at its common point.
    const auto pencil = make_family("pencil", 10, rng);
    CHECK(near_tangent_pairs(pencil, 1e-6, geometry::default_window()) == 45);
    // Concentric circles with distinct radii are never tangent.
    std::vector<PhiCircle> rings;
    for (int k = 0; k < 5; ++k) rings.emplace_back(geometry::make_euclidean(), Vec2::Zero(), 0.91 + 0.01 * k);
    CHECK(near_tangent_pairs(rings, 5e-3, geometry::default_window()) == 0);
}

TEST_CASE("acceptance formatting") {
    CriterionResult r{3, "demo", true, 1.25, 60, "max 2"};
    CHECK(format_result(r) == "[PASS]  3 demo: max 2 (1.2 s, limit 60 s)");
    std::ostringstream os;
    write_acceptance_csv(os, {r});
    CHECK(os.str() == "id,name,pass,seconds,limit_seconds,detail\n3,\"demo\",1,1.250,60,\"max 2\"\n");
    FrozenConstants k;
    CHECK_THROWS_AS(run_criterion(0, k), ConfigError);
    CHECK_THROWS_AS(run_criterion(12, k), ConfigError);
}

TEST_CASE("closed-form criterion passes on the frozen table") {
    const auto r = run_criterion(1, load_frozen());
    CHECK(r.pass);
    CHECK(r.seconds < r.limit_seconds);
}
