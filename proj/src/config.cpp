#include "phi4/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace phi4 {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw ConfigError("config key '" + key + "' must be namespaced as section.key");
        if (val.empty()) throw ConfigError("config key '" + key + "' has an empty value");
        if (!c.kv_.emplace(key, val).second)
            throw ConfigError("duplicate config key '" + key + "'");
    }
    return c;
}

std::string Config::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string s = get_str(key);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + s + "' as a number");
    }
    if (pos != s.size())
        throw ConfigError("config key '" + key + "': trailing junk in '" + s + "'");
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const std::string s = get_str(key);
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + s + "' as an integer");
    }
    if (pos != s.size())
        throw ConfigError("config key '" + key + "': trailing junk in '" + s + "'");
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + s + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string s = get_str(key);
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': cannot parse list item '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

void Config::check_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : kv_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [key, value] : kv_) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

} // namespace phi4
