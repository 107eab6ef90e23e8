#pragma once

// Flat key = value configuration files.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tdw {

/**
 * One `key = value` pair per line; `#` starts a comment, blank lines are
 * ignored, keys are unique. Typed getters throw ConfigError on malformed
 * values. Every key read through a getter is marked used so callers can reject
 * unknown keys with require_all_used().
 */
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::optional<std::string> raw(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Keys with the given prefix, prefix stripped.
    std::map<std::string, std::string> with_prefix(const std::string& prefix) const;

    void require_all_used() const;
    const std::map<std::string, std::string>& values() const { return values_; }
    const std::string& origin() const { return origin_; }

    /// Canonical text form: sorted keys, one `key = value` per line.
    std::string to_string() const;

private:
    std::map<std::string, std::string> values_;
    std::string origin_{"<empty>"};
    mutable std::set<std::string> used_;
};

/// Comma separated reals, e.g. "10,100,1000".
std::vector<double> parse_list(const std::string& text);

}  // namespace tdw
