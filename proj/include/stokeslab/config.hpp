#pragma once

#include <map>
#include <set>
#include <string>

#include "stokeslab/errors.hpp"

namespace stokeslab {

// Flat key-value configuration with INI-style [section] headers; keys are
// stored as "section.key".  Unknown keys are rejected at validation time so
// typos surface as ConfigError rather than silently using defaults.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Throws ConfigError naming the first key not in the allowed set.
    void validate_keys(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace stokeslab
