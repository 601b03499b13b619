#include "circmax/harness/config.h"

#include "circmax/common/error.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace circmax::harness {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

}  // namespace

Config Config::parse(std::string_view text) {
    Config c;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (c.has(full)) throw ConfigError("line " + std::to_string(lineno) + ": repeated key " + full);
        c.values_[full] = trim(std::string_view(line).substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    values_[key] = buf;
}

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<double>(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<int>(key, it->second);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + it->second + "'");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
    return out;
}

double Config::positive_double(const std::string& key, double fallback) const {
    const double v = get_double(key, fallback);
    if (!(v > 0.0)) throw ConfigError(key + " must be positive");
    return v;
}

int Config::positive_int(const std::string& key, int fallback) const {
    const int v = get_int(key, fallback);
    if (v <= 0) throw ConfigError(key + " must be positive");
    return v;
}

std::string Config::dump() const {
    std::ostringstream os;
    std::string section;
    bool first = true;
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& [k, v] : values_) {
            const auto dot = k.find('.');
            if ((dot == std::string::npos) != (pass == 0)) continue;
            if (pass == 1) {
                const std::string s = k.substr(0, dot);
                if (s != section || first) {
                    os << (os.tellp() > 0 ? "\n" : "") << '[' << s << "]\n";
                    section = s;
                    first = false;
                }
                os << k.substr(dot + 1) << " = " << v << '\n';
            } else {
                os << k << " = " << v << '\n';
            }
        }
    return os.str();
}

}  // namespace circmax::harness
