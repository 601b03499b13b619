#pragma once

#include "circmax/harness/config.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace circmax::harness {

inline constexpr const char* kVersion = "circmax 1.0.0";

struct OutputDigest {
    std::string file;
    std::string sha256;
};

struct RunManifest {
    std::string subcommand;
    Config config;
    std::string version = kVersion;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<OutputDigest> outputs;
    /// Free-form numbers worth keeping next to the digests.
    std::vector<std::pair<std::string, double>> summary;

    /// Digests `path` and records it under its file name.
    void add_output(const std::filesystem::path& path);
    std::string to_json() const;
    /// Writes manifest.json into `dir`.
    void write(const std::filesystem::path& dir) const;
};

/// Lowercase hex SHA-256 of a file. Throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& data);

}  // namespace circmax::harness
