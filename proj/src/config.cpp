#include "tdw/config.hpp"

#include <fstream>
#include <sstream>

#include "tdw/errors.hpp"
#include "tdw/profile_io.hpp"

namespace tdw {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    const auto v = raw(key);
    if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return *v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    try {
        return parse_double(*v);
    } catch (const FileFormatError&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + *v + "'");
    }
}

double KeyValueConfig::require_double(const std::string& key) const {
    require_string(key);
    return get_double(key, 0.0);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + *v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    try {
        return parse_list(*v);
    } catch (const ConfigError& e) {
        throw ConfigError(origin_ + ": key '" + key + "': " + e.what());
    }
}

std::map<std::string, std::string> KeyValueConfig::with_prefix(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    for (const auto& [key, value] : values_) {
        if (key.rfind(prefix, 0) == 0) {
            used_.insert(key);
            out[key.substr(prefix.size())] = value;
        }
    }
    return out;
}

void KeyValueConfig::require_all_used() const {
    for (const auto& [key, value] : values_) {
        if (!used_.count(key)) throw ConfigError(origin_ + ": unknown key '" + key + "'");
    }
}

std::string KeyValueConfig::to_string() const {
    std::string out;
    for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(parse_double(item));
        } catch (const FileFormatError&) {
            throw ConfigError("bad list entry '" + trim(item) + "' in '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

}  // namespace tdw
