#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/grid.hpp"
#include "polariton/kinetics.hpp"
#include "polariton/material.hpp"

namespace polariton {

/// Configuration problem, carrying the source line when one exists.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct GridSettings {
    std::size_t N = 150;
    double k_max = 0.5;
    Spacing spacing = Spacing::uniform_k;
    bool operator==(const GridSettings&) const = default;
};

struct RunSettings {
    double t_end = 2000.0;  // ps
    int threads = 0;        // 0 uses the OpenMP default
    bool operator==(const RunSettings&) const = default;
};

struct StationarySettings {
    double window = 200.0;  // ps
    double eps = 0.02;
    bool operator==(const StationarySettings&) const = default;
};

struct ThresholdSettings {
    double p_min = 1.0e-6;  // ps^-1
    double p_max = 1.0e2;   // ps^-1
    int max_iterations = 40;
    double target = 1.0;
    double tolerance = 0.1;
    bool operator==(const ThresholdSettings&) const = default;
};

struct SweepSettings {
    std::string preset = "none";  // none | fig1 | fig2 | fig3 | fig4 | fig5
    std::vector<double> B = {0.0, 2.0, 4.0};
    std::vector<double> k_p = {0.02, 0.1, 0.2};
    std::vector<double> p_multipliers = {2.4};
    std::vector<double> scurve_multipliers = {0.5, 0.8, 1.0, 1.25, 1.6, 2.0, 2.4, 5.0, 10.0,
                                              20.0, 50.0, 100.0};
    bool rereference = false;  // re-find p_th at every B instead of reusing B = 0
    double reference_k_p = -1.0;  // k_p of the reference threshold; negative means the point's own
    bool operator==(const SweepSettings&) const = default;
};

/// Fully resolved run configuration (defaults plus overrides).
struct RunConfig {
    MaterialSet material;
    GridSettings grid;
    double B = 0.0;
    PumpSpec pump;
    IntegratorSettings integrator;
    RunSettings run;
    StationarySettings stationary;
    ThresholdSettings threshold;
    SweepSettings sweep;
    Terms terms;
    std::string output_dir = "out";
    std::string kernel_cache_dir;

    /// Throws ConfigError on any out-of-range value.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Applies one `key = value` assignment; `source`/`line` only label errors.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   std::string_view source = "<override>", std::size_t line = 0);

/// Where a key was last assigned.
struct KeyOrigin {
    std::string source;
    std::size_t line = 0;
};

/// Parses flat `dotted.key = value` text. '#' starts a comment. Syntax and
/// value errors carry the offending line; cross-field checks are left to
/// validate_config.
RunConfig parse_config_text(std::string_view text, std::string_view source = "<text>",
                            std::map<std::string, KeyOrigin>* origins = nullptr);
RunConfig parse_config(const std::filesystem::path& path,
                       std::map<std::string, KeyOrigin>* origins = nullptr);

/// Like RunConfig::validate, but reports the line that set the offending key.
void validate_config(const RunConfig& config, const std::map<std::string, KeyOrigin>& origins);

/// Every key with its resolved value, one `key = value` per line, round-trip exact.
std::string serialize_config(const RunConfig& config);

/// All recognised keys, in serialization order.
std::vector<std::string> config_keys();

}  // namespace polariton
