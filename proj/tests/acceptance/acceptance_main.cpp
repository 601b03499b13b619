#include "circmax/common/error.h"
#include "circmax/harness/acceptance.h"
#include "circmax/harness/frozen.h"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace circmax::harness;
    CLI::App app{"Acceptance suite: one line per criterion", "circmax_acceptance"};
    std::vector<int> only;
    std::string frozen = default_frozen_path().string();
    unsigned jobs = 1;
    app.add_option("--only", only, "Criterion ids to run");
    app.add_option("--frozen", frozen, "Frozen constant table");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    try {
        const FrozenConstants k = load_frozen(frozen);
        std::cout << "frozen table " << frozen << " (corpus " << k.corpus << ")" << std::endl;
        AcceptanceOptions o;
        o.jobs = jobs;
        const auto results =
            run_acceptance(k, o, only, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
        std::size_t passed = 0;
        for (const auto& r : results) passed += r.pass;
        std::cout << passed << '/' << results.size() << " criteria passed" << std::endl;
        return passed == results.size() ? 0 : 1;
    } catch (const circmax::Error& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    }
}
