#include "stokeslab/config.hpp"

#include <fstream>
#include <sstream>

namespace stokeslab {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("unterminated section header at line " + std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ConfigError("empty section name at line " + std::to_string(lineno));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        // strip trailing inline comments ("value  # note")
        for (char marker : {'#', ';'}) {
            size_t pos = val.find(marker);
            while (pos != std::string::npos && pos > 0 && val[pos - 1] != ' ' && val[pos - 1] != '\t') {
                pos = val.find(marker, pos + 1);
            }
            if (pos != std::string::npos) val = trim(val.substr(0, pos));
        }
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full)) throw ConfigError("duplicate key '" + full + "'");
        cfg.values_[full] = val;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "' is not a number: '" + it->second + "'");
    }
}

int Config::get_int(const std::string& key, int def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
        size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "' is not an integer: '" + it->second + "'");
    }
}

void Config::validate_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
        if (!allowed.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
    }
}

}  // namespace stokeslab
