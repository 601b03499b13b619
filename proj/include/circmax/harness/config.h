#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace circmax::harness {

/// Flat key = value text with [section] headers. Keys are addressed as
/// "section.key"; keys before any header have no prefix. Lines starting with
/// '#' or ';' are comments.
class Config {
public:
    /// Throws ConfigError on a malformed line or a repeated key.
    static Config parse(std::string_view text);
    /// Throws IoError when the file cannot be read.
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set(const std::string& key, double value);
    void merge(const Config& other);

    /// Typed getters throw ConfigError when the value does not parse.
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated numbers.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Same as the typed getters, and ConfigError unless the value is > 0.
    double positive_double(const std::string& key, double fallback) const;
    int positive_int(const std::string& key, int fallback) const;

    /// Canonical text: unprefixed keys first, then sections in order.
    std::string dump() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace circmax::harness
