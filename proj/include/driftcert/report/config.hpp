#pragma once

// Run configuration: "section.key" -> text, read from an INI-style file
// (sections in brackets, key = value lines) and overridden by flags.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>

#include <boost/property_tree/exceptions.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "driftcert/fields/model.hpp"

namespace driftcert {

// Usage or configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RunConfig {
public:
    static RunConfig from_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(path.string(), tree);
        } catch (const boost::property_tree::ptree_error& e) {
            throw ConfigError("cannot parse config file " + path.string() + ": " + e.what());
        }
        RunConfig cfg;
        for (const auto& [section, body] : tree) {
            if (body.empty()) {
                cfg.set(section, body.data());
                continue;
            }
            for (const auto& [key, value] : body) cfg.set(section + "." + key, value.data());
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // "section.key=value"
    void set_assignment(const std::string& text) {
        const auto eq = text.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("expected section.key=value, got '" + text + "'");
        set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double real(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        double v = 0.0;
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw ConfigError("'" + key + "' must be a number, got '" + s + "'");
        return v;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::uint64_t v = 0;
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw ConfigError("'" + key + "' must be a non-negative integer, got '" + s + "'");
        return v;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

// Model coefficients from the [model] section with per-command defaults.
inline ModelParams model_from(const RunConfig& cfg, const ModelParams& defaults) {
    try {
        return {cfg.real("model.a1", defaults.a1),         cfg.real("model.a2", defaults.a2),
                cfg.real("model.alpha1", defaults.alpha1), cfg.real("model.alpha2", defaults.alpha2),
                cfg.real("model.kappa1", defaults.kappa1), cfg.real("model.kappa2", defaults.kappa2)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model parameters: ") + e.what());
    }
}

}  // namespace driftcert
