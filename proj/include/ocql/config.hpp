#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocql {

// Raised for malformed files, missing required keys, and unparseable values.
// what() always names the offending file:line or key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Flat key=value configuration with [section] prefixes and `include <path>`
// directives. Later assignments override earlier ones, so an experiment file
// includes an environment preset first and then overrides individual keys.
//
//   # comment
//   seed = 42
//   include cs1.cfg           # path relative to the including file
//   [agent]
//   iterations = 2000         # stored as "agent.iterations"
//
// Values are strings until queried; vector values are comma separated.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_string(const std::string& text, const std::string& name = "<inline>");

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_vector(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_vector(const std::string& key, const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);  // CLI overrides

    std::vector<std::string> keys() const;

private:
    struct Entry {
        std::string value;
        std::string origin;  // "file:line" for diagnostics
    };
    std::map<std::string, Entry> entries_;

    void parse_stream(std::istream& in, const std::string& name, const std::string& dir, int depth);
    const Entry& require(const std::string& key) const;
};

}  // namespace ocql
