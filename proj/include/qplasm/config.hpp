#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qplasm/errors.hpp"

namespace qplasm::cli {

// Nested key-value config: '[section]' headers, 'key = value' lines,
// '#' comments. Physical quantities carry their unit as a key suffix
// (_deg, _nm, _rad_s, _per_nm); a bare base name is rejected so no
// value can be read in the wrong unit system.
class Config {
  public:
    static Config parse(std::istream& in, const std::string& name) {
        Config cfg;
        cfg.name_ = name;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw config_error(cfg.where(lineno) + ": malformed section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                if (section.empty())
                    throw config_error(cfg.where(lineno) + ": empty section name");
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error(cfg.where(lineno) + ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty() || value.empty())
                throw config_error(cfg.where(lineno) + ": empty key or value");
            const std::string path = section.empty() ? key : section + "." + key;
            if (cfg.values_.count(path))
                throw config_error(cfg.where(lineno) + ": duplicate key '" + path + "'");
            cfg.values_[path] = value;
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config: " + path);
        return parse(in, path);
    }

    bool has(const std::string& path) const { return values_.count(path) > 0; }

    std::string get_string(const std::string& path) const {
        auto it = values_.find(path);
        if (it == values_.end()) {
            // Unit-suffix diagnosis: a physical key given without its unit.
            for (const char* suffix : {"_deg", "_nm", "_rad_s", "_per_nm"}) {
                const std::string base =
                    path.size() > std::string(suffix).size() &&
                            path.compare(path.size() - std::string(suffix).size(),
                                         std::string::npos, suffix) == 0
                        ? path.substr(0, path.size() - std::string(suffix).size())
                        : "";
                if (!base.empty() && values_.count(base))
                    throw config_error(name_ + ": " + base +
                                       ": missing unit suffix, expected '" + path + "'");
            }
            throw config_error(name_ + ": missing required key '" + path + "'");
        }
        return it->second;
    }

    double get_double(const std::string& path) const {
        const std::string v = get_string(path);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            throw config_error(name_ + ": " + path + ": not a number: '" + v + "'");
        }
        if (used != v.size())
            throw config_error(name_ + ": " + path + ": trailing junk in '" + v + "'");
        return x;
    }

    long get_long(const std::string& path) const {
        const double x = get_double(path);
        const long l = static_cast<long>(x);
        if (static_cast<double>(l) != x)
            throw config_error(name_ + ": " + path + ": expected an integer");
        return l;
    }

    double get_double_or(const std::string& path, double fallback) const {
        return has(path) ? get_double(path) : fallback;
    }

    long get_long_or(const std::string& path, long fallback) const {
        return has(path) ? get_long(path) : fallback;
    }

    std::string get_string_or(const std::string& path, const std::string& fallback) const {
        return has(path) ? get_string(path) : fallback;
    }

    // Keys of one section, in deterministic (sorted) order.
    std::vector<std::string> section_keys(const std::string& section) const {
        std::vector<std::string> out;
        const std::string prefix = section + ".";
        for (const auto& [k, v] : values_)
            if (k.rfind(prefix, 0) == 0) out.push_back(k);
        return out;
    }

    const std::map<std::string, std::string>& all() const { return values_; }
    const std::string& name() const { return name_; }

    void set(const std::string& path, const std::string& value) {
        values_[path] = value;
    }

    // FNV-1a over the sorted key=value pairs; stable across reruns.
    std::uint64_t content_hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto eat = [&h](const std::string& s) {
            for (unsigned char c : s) {
                h ^= c;
                h *= 1099511628211ULL;
            }
        };
        for (const auto& [k, v] : values_) {
            eat(k);
            eat("=");
            eat(v);
            eat("\n");
        }
        return h;
    }

  private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    std::string where(int lineno) const { return name_ + ":" + std::to_string(lineno); }

    std::string name_ = "<config>";
    std::map<std::string, std::string> values_;
};

}  // namespace qplasm::cli
