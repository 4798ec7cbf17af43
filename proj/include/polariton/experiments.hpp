#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/grid.hpp"
#include "polariton/kinetics.hpp"
#include "polariton/scattering.hpp"

namespace polariton {

/// Grid plus precomputed kernels for one material and field.
struct Model {
    MaterialSet material;
    FieldState field;
    KGrid grid;
    PhononKernel phonon;
    PairChannels pp;
    std::string grid_hash;
    std::string kernel_hash;
    double build_seconds = 0.0;
    bool phonon_from_cache = false;
};

/// Builds the model for `config` at field B. A non-empty
/// config.kernel_cache_dir stores and reuses the p-ph base kernel.
std::shared_ptr<const Model> build_model(const RunConfig& config, double B);

struct PointResult {
    Trajectory trajectory;
    StationaryResult stationary;
    double n0 = 0.0;       // at t_end
    double N_tot = 0.0;    // at t_end
    double seconds = 0.0;
};

/// Evolves from vacuum to config.run.t_end under `pump`.
PointResult run_point(const Model& model, const RunConfig& config, const PumpSpec& pump);

struct ThresholdStep {
    double p0;
    double n0;
    bool stationary;
};

struct ThresholdResult {
    bool found = false;
    double p_th = 0.0;
    double n0 = 0.0;          // stationary n0 at p_th
    double max_n0 = 0.0;      // largest n0 seen (for non-bracketable reports)
    std::vector<ThresholdStep> history;
    std::string message;
};

/// Log-bisection on p0 within [threshold.p_min, threshold.p_max] until the
/// n0 at t_end lies within target * (1 +- tolerance).
ThresholdResult find_threshold(const Model& model, const RunConfig& config, double k_p);

struct ScurvePoint {
    double multiplier;
    double p0;
    double n0;
    double N_tot;
    bool stationary;
    bool failed;
    std::string error;
};

std::vector<ScurvePoint> run_scurve(const Model& model, const RunConfig& config, double k_p,
                                    double p_th, const std::vector<double>& multipliers);

struct SweepKey {
    double B;
    double k_p;
    double multiplier;
    auto operator<=>(const SweepKey&) const = default;
};

struct SweepRecord {
    double B = 0.0;
    double k_p = 0.0;
    double multiplier = 0.0;
    double p0 = 0.0;
    double p_th_ref = 0.0;
    double n0 = 0.0;
    double N_tot = 0.0;
    double stationary_time = 0.0;
    bool converged = false;
    bool failed = false;
    std::string error;
    double seconds = 0.0;
};

struct SweepResult {
    std::map<SweepKey, SweepRecord> records;
    std::map<double, ThresholdResult> references;  // keyed by k_p (B = 0 unless re-referenced)
    std::map<double, std::string> kernel_hashes;   // keyed by B
};

/// For every (B, k_p, multiplier): p0 = multiplier * p_th(B = 0, k_p_ref) with
/// k_p_ref = k_p (or sweep.reference_k_p when set). One failing point is
/// recorded and does not stop the sweep.
SweepResult run_field_sweep(const RunConfig& config);

/// Applies a named figure preset on top of `config` (axes, multipliers).
RunConfig apply_preset(RunConfig config, const std::string& preset);

}  // namespace polariton
