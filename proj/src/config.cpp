#include "ocql/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ocql {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strips a trailing comment that starts at '#' (values themselves never contain '#').
std::string strip_comment(const std::string& s) {
    size_t pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

Config Config::load(const std::string& path) {
    Config cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string dir = std::filesystem::path(path).parent_path().string();
    cfg.parse_stream(in, path, dir, 0);
    return cfg;
}

Config Config::from_string(const std::string& text, const std::string& name) {
    Config cfg;
    std::istringstream in(text);
    cfg.parse_stream(in, name, ".", 0);
    return cfg;
}

void Config::parse_stream(std::istream& in, const std::string& name, const std::string& dir, int depth) {
    if (depth > 8) throw ConfigError("config: include depth exceeded at '" + name + "'");
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string origin = name + ":" + std::to_string(lineno);
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError("config: unterminated section at " + origin);
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        if (body.rfind("include ", 0) == 0) {
            std::filesystem::path inc = trim(body.substr(8));
            if (inc.is_relative()) inc = std::filesystem::path(dir) / inc;
            std::ifstream sub(inc);
            if (!sub) throw ConfigError("config: cannot open include '" + inc.string() + "' at " + origin);
            parse_stream(sub, inc.string(), inc.parent_path().string(), depth + 1);
            continue;
        }
        size_t eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected 'key = value' at " + origin);
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key at " + origin);
        if (!section.empty()) key = section + "." + key;
        entries_[key] = Entry{value, origin};
    }
}

const Config::Entry& Config::require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config: missing required field '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return require(key).value; }

double Config::get_double(const std::string& key) const {
    const Entry& e = require(key);
    try {
        size_t used = 0;
        double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: field '" + key + "' at " + e.origin + " is not a number: '" + e.value + "'");
    }
}

int Config::get_int(const std::string& key) const {
    const Entry& e = require(key);
    try {
        size_t used = 0;
        long v = std::stol(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing junk");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: field '" + key + "' at " + e.origin + " is not an integer: '" + e.value + "'");
    }
}

bool Config::get_bool(const std::string& key) const {
    const Entry& e = require(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError("config: field '" + key + "' at " + e.origin + " is not a bool: '" + e.value + "'");
}

std::vector<double> Config::get_vector(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    std::string item;
    std::istringstream ss(e.value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty element in '" + key + "' at " + e.origin);
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw ConfigError("config: bad element '" + item + "' in '" + key + "' at " + e.origin);
        }
    }
    if (out.empty()) throw ConfigError("config: field '" + key + "' at " + e.origin + " is empty");
    return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}
bool Config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}
std::vector<double> Config::get_vector(const std::string& key, const std::vector<double>& fallback) const {
    return has(key) ? get_vector(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = Entry{value, "<override>"};
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

}  // namespace ocql
