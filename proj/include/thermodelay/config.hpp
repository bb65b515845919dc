/// @file config.hpp
/// @brief Flat key=value run configuration with [sections] and command-line overrides.
///
/// Keys are addressed as "section.key". Every known key has a default; an
/// empty default means "not set" (the run derives a value). Unknown keys are
/// rejected so that typos fail loudly.

#pragma once

#include "thermodelay/integrate.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace thermodelay {

/// Thrown for malformed files, unknown keys and unparsable values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Config {
public:
    /// All known keys at their defaults.
    Config();

    /// INI-style text, or a JSON summary whose "config" object echoes a previous run.
    static Config parse(std::string_view text, const std::string& origin = "<string>");
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// "section.key=value"
    void apply_override(const std::string& assignment);

    bool is_set(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    /// Every key with its current value, in a fixed order.
    const std::map<std::string, std::string>& entries() const { return values_; }
    /// Re-serialized INI text (round-trips through parse).
    std::string to_ini() const;

private:
    std::map<std::string, std::string> values_;
};

/// "a,b,c" or "lo:hi:step" (inclusive, step > 0).
std::vector<double> parse_list(const std::string& text);
double parse_double(const std::string& text, const std::string& what);

/// Shortest text that reads back to the same double.
std::string format_double(double x);

PhysParams physical_params(const Config& c);
LyapunovOptions lyapunov_options(const Config& c);
SimulationConfig simulation_config(const Config& c);

}  // namespace thermodelay
