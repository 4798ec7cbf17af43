#include "polariton/experiments.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "polariton/hash.hpp"

namespace polariton {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t phonon_cache_key(const KGrid& grid, const MaterialSet& m) {
    ContentHash h;
    h.add(std::string_view("pph-base/1"));
    h.add(grid.content_hash());
    for (double v : {m.qw_thickness, m.qw_area, m.mass_density, m.sound_velocity,
                     m.deformation_potential_e, m.deformation_potential_h, m.bohr_radius,
                     m.electron_mass, m.hole_mass}) {
        h.add(v);
    }
    return h.value();
}

std::string kernel_digest(const PhononKernel& phonon, const PairChannels& pp) {
    ContentHash h;
    h.add(std::span<const double>(phonon.base));
    h.add(static_cast<std::uint64_t>(pp.channels.size()));
    for (const PairChannel& c : pp.channels) {
        h.add((std::uint64_t{c.i} << 48) ^ (std::uint64_t{c.j} << 32) ^ (std::uint64_t{c.l} << 16) ^
              std::uint64_t{c.m});
        h.add(c.weight);
    }
    return h.hex();
}

}  // namespace

std::shared_ptr<const Model> build_model(const RunConfig& config, double B) {
    const auto start = Clock::now();
    const MaterialSet& material = config.material;
    const FieldState field = make_field_state(material, B);
    KGrid grid = build_grid(material, field, config.grid.N, config.grid.k_max, config.grid.spacing);

    PhononKernel phonon;
    bool cached = false;
    std::filesystem::path cache_path;
    const std::uint64_t key = phonon_cache_key(grid, material);
    if (!config.kernel_cache_dir.empty()) {
        cache_path = std::filesystem::path(config.kernel_cache_dir) /
                     (ContentHash().add(key).hex() + ".pphk");
        if (auto hit = load_phonon_kernel(cache_path, key, grid, material.temperature)) {
            phonon = std::move(*hit);
            cached = true;
        }
    }
    if (!cached) {
        phonon = build_phonon_kernel(grid, material, field);
        if (!cache_path.empty()) {
            std::filesystem::create_directories(cache_path.parent_path());
            save_phonon_kernel(cache_path, phonon, key);
        }
    }
    PairChannels pp = build_pp_channels(grid, material, field);

    auto model = std::make_shared<Model>(Model{material, field, std::move(grid), std::move(phonon),
                                               std::move(pp), {}, {}, 0.0, cached});
    model->grid_hash = model->grid.content_hash();
    model->kernel_hash = kernel_digest(model->phonon, model->pp);
    model->build_seconds = seconds_since(start);
    return model;
}

PointResult run_point(const Model& model, const RunConfig& config, const PumpSpec& pump) {
    const auto start = Clock::now();
    BoltzmannRhs system(model.grid, model.phonon, model.pp, pump, config.terms);
    KineticState initial{0.0, std::vector<double>(model.grid.size(), 0.0)};
    PointResult result;
    result.trajectory = evolve(system, initial, config.run.t_end, config.integrator);
    result.stationary = detect_stationary(result.trajectory.samples, config.stationary.window,
                                          config.stationary.eps);
    result.n0 = result.trajectory.samples.back().n0;
    result.N_tot = result.trajectory.samples.back().N_tot;
    result.seconds = seconds_since(start);
    return result;
}

ThresholdResult find_threshold(const Model& model, const RunConfig& config, double k_p) {
    const ThresholdSettings& ts = config.threshold;
    const double lo_target = ts.target * (1.0 - ts.tolerance);
    const double hi_target = ts.target * (1.0 + ts.tolerance);
    ThresholdResult result;

    auto eval = [&](double p0) {
        PumpSpec pump = config.pump;
        pump.p0 = p0;
        pump.k_p = k_p;
        const PointResult r = run_point(model, config, pump);
        result.history.push_back({p0, r.n0, r.stationary.reached});
        result.max_n0 = std::max(result.max_n0, r.n0);
        return r.n0;
    };
    auto accept = [&](double p0, double n0) {
        result.found = true;
        result.p_th = p0;
        result.n0 = n0;
    };

    double lo = ts.p_min;
    double hi = ts.p_max;
    const double n_lo = eval(lo);
    if (n_lo >= lo_target && n_lo <= hi_target) {
        accept(lo, n_lo);
        return result;
    }
    if (n_lo > hi_target) {
        result.message = "n0 exceeds the target already at the lower pump bound";
        return result;
    }
    const double n_hi = eval(hi);
    if (n_hi >= lo_target && n_hi <= hi_target) {
        accept(hi, n_hi);
        return result;
    }
    if (n_hi < lo_target) {
        result.message = "n0 never reaches the target within the pump bounds (max n0 = " +
                         std::to_string(result.max_n0) + ")";
        return result;
    }
    for (int it = 2; it < ts.max_iterations; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double n = eval(mid);
        if (n >= lo_target && n <= hi_target) {
            accept(mid, n);
            return result;
        }
        (n < ts.target ? lo : hi) = mid;
    }
    result.message = "bisection did not reach the target band within the iteration limit";
    result.p_th = std::sqrt(lo * hi);
    return result;
}

std::vector<ScurvePoint> run_scurve(const Model& model, const RunConfig& config, double k_p,
                                    double p_th, const std::vector<double>& multipliers) {
    std::vector<ScurvePoint> out;
    for (double m : multipliers) {
        ScurvePoint pt{m, m * p_th, 0.0, 0.0, false, false, {}};
        PumpSpec pump = config.pump;
        pump.p0 = pt.p0;
        pump.k_p = k_p;
        try {
            const PointResult r = run_point(model, config, pump);
            pt.n0 = r.n0;
            pt.N_tot = r.N_tot;
            pt.stationary = r.stationary.reached;
        } catch (const NumericalError& e) {
            pt.failed = true;
            pt.error = e.what();
        }
        out.push_back(pt);
    }
    return out;
}

SweepResult run_field_sweep(const RunConfig& config) {
    SweepResult result;
    std::map<double, std::shared_ptr<const Model>> models;
    auto model_at = [&](double B) {
        auto it = models.find(B);
        if (it == models.end()) {
            it = models.emplace(B, build_model(config, B)).first;
            result.kernel_hashes[B] = it->second->kernel_hash;
        }
        return it->second;
    };
    auto reference_k = [&](double k_p) {
        return config.sweep.reference_k_p >= 0.0 ? config.sweep.reference_k_p : k_p;
    };

    // Re-referenced thresholds depend on B as well, so they live in a separate table.
    std::map<std::pair<double, double>, ThresholdResult> per_field;
    auto reference = [&](double B, double k_p) -> const ThresholdResult& {
        const double k_ref = reference_k(k_p);
        if (config.sweep.rereference) {
            auto key = std::make_pair(B, k_ref);
            auto it = per_field.find(key);
            if (it == per_field.end()) {
                it = per_field.emplace(key, find_threshold(*model_at(B), config, k_ref)).first;
            }
            return it->second;
        }
        auto it = result.references.find(k_ref);
        if (it == result.references.end()) {
            it = result.references.emplace(k_ref, find_threshold(*model_at(0.0), config, k_ref)).first;
        }
        return it->second;
    };

    const std::set<double> Bs(config.sweep.B.begin(), config.sweep.B.end());
    const std::set<double> kps(config.sweep.k_p.begin(), config.sweep.k_p.end());
    const std::set<double> mults(config.sweep.p_multipliers.begin(), config.sweep.p_multipliers.end());
    for (double k_p : kps) {
        for (double B : Bs) {
            for (double mult : mults) {
                SweepRecord rec;
                rec.B = B;
                rec.k_p = k_p;
                rec.multiplier = mult;
                try {
                    const ThresholdResult& ref = reference(B, k_p);
                    if (!ref.found) {
                        rec.failed = true;
                        rec.error = "no reference threshold: " + ref.message;
                    } else {
                        rec.p_th_ref = ref.p_th;
                        rec.p0 = mult * ref.p_th;
                        PumpSpec pump = config.pump;
                        pump.p0 = rec.p0;
                        pump.k_p = k_p;
                        const PointResult r = run_point(*model_at(B), config, pump);
                        rec.n0 = r.n0;
                        rec.N_tot = r.N_tot;
                        rec.converged = r.stationary.reached;
                        rec.stationary_time = r.stationary.time;
                        rec.seconds = r.seconds;
                    }
                } catch (const NumericalError& e) {
                    rec.failed = true;
                    rec.error = e.what();
                }
                result.records[{B, k_p, mult}] = rec;
            }
        }
    }
    for (auto& [key, thr] : per_field) result.references.emplace(key.second, thr);
    return result;
}

RunConfig apply_preset(RunConfig config, const std::string& preset) {
    SweepSettings& s = config.sweep;
    s.preset = preset;
    if (preset == "fig1") {
        s.B = {0, 1, 2, 3, 4, 5, 6};
    } else if (preset == "fig2") {
        config.B = 0.0;
        config.pump.k_p = 0.02;
        s.scurve_multipliers = {0.5, 0.8, 1.0, 1.25, 1.6, 2.0, 2.4, 5.0, 10.0, 20.0, 50.0, 100.0};
    } else if (preset == "fig3") {
        s.B = {0, 1, 2, 3, 4, 5, 6};
        s.k_p = {0.02, 0.2};
        s.p_multipliers = {2.4};
        s.reference_k_p = -1.0;
    } else if (preset == "fig4") {
        s.B = {0, 4, 5};
        s.k_p = {0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2, 0.22, 0.24, 0.26, 0.28, 0.3};
        s.p_multipliers = {2.4};
        s.reference_k_p = 0.02;
    } else if (preset == "fig5") {
        s.B = {0, 1, 2, 3, 4, 5, 6};
        s.k_p = {0.2};
        s.p_multipliers = {2.4};
        s.reference_k_p = -1.0;
    } else if (preset != "none") {
        throw ConfigError("config", 0, "unknown experiment.preset '" + preset + "'");
    }
    return config;
}

}  // namespace polariton
