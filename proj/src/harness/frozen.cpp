#include "circmax/harness/frozen.h"

#include "circmax/common/error.h"

#include <fstream>

namespace circmax::harness {

namespace {

struct Field {
    const char* key;
    double FrozenConstants::*member;
};

constexpr Field kFields[] = {
    {"C1", &FrozenConstants::C1},
    {"C0", &FrozenConstants::C0},
    {"area_C", &FrozenConstants::area_C},
    {"K_inc", &FrozenConstants::K_inc},
    {"C_eps", &FrozenConstants::C_eps},
    {"C_kst", &FrozenConstants::C_kst},
    {"cutting_C", &FrozenConstants::cutting_C},
    {"cell_C", &FrozenConstants::cell_C},
    {"maximal_trivial_C", &FrozenConstants::maximal_trivial_C},
    {"multiplicity_C", &FrozenConstants::multiplicity_C},
    {"apollonius_C", &FrozenConstants::apollonius_C},
    {"C_surface", &FrozenConstants::C_surface},
    {"C_tangent", &FrozenConstants::C_tangent},
};

}  // namespace

Config FrozenConstants::to_config() const {
    Config c;
    c.set("frozen.frozen", frozen ? std::string("true") : std::string("false"));
    c.set("frozen.corpus", corpus);
    for (const auto& f : kFields) c.set(std::string("constants.") + f.key, this->*f.member);
    return c;
}

FrozenConstants FrozenConstants::from_config(const Config& c) {
    FrozenConstants k;
    k.frozen = c.get_bool("frozen.frozen", false);
    k.corpus = c.get_string("frozen.corpus", "");
    for (const auto& f : kFields) k.*f.member = c.get_double(std::string("constants.") + f.key, k.*f.member);
    return k;
}

std::filesystem::path default_frozen_path() {
    return std::filesystem::path(CIRCMAX_SOURCE_DIR) / "data" / "frozen_constants.cfg";
}

FrozenConstants load_frozen(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("no frozen constant table at " + path.string());
    const FrozenConstants k = FrozenConstants::from_config(Config::load(path));
    if (!k.frozen) throw ConfigError("constant table " + path.string() + " is not frozen; run calibrate first");
    for (const auto& f : kFields)
        if (!(k.*f.member > 0.0)) throw ConfigError(std::string("frozen constant ") + f.key + " must be positive");
    return k;
}

void save_frozen(const FrozenConstants& k, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << "# Written by circmax calibrate. Acceptance runs read this table and never refit it.\n";
    f << k.to_config().dump();
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace circmax::harness
