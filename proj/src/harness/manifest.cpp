#include "circmax/harness/manifest.h"

#include "circmax/common/error.h"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

namespace circmax::harness {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
    }
    void update(const void* data, std::size_t size) {
        if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw IoError("sha256 update failed");
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw IoError("sha256 final failed");
        std::string out;
        char buf[3];
        for (unsigned i = 0; i < len; ++i) {
            std::snprintf(buf, sizeof buf, "%02x", md[i]);
            out += buf;
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf;
    while (f) {
        f.read(buf.data(), buf.size());
        if (f.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    return h.hex();
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.push_back({path.filename().string(), sha256_file(path)});
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["version"] = version;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    j["config"] = config.values();
    j["trial_seeds"] = trial_seeds;
    auto& outs = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"sha256", o.sha256}});
    auto& s = j["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : summary) s[k] = v;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const auto path = dir / "manifest.json";
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << to_json();
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace circmax::harness
