// polariton: command-line front end for dispersion export, single runs,
// threshold searches, S-curves and magnetic-field sweeps.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polariton/config.hpp"
#include "polariton/experiments.hpp"
#include "polariton/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace polariton;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    std::string preset;
    int threads = -1;
};

RunConfig resolve(const Options& opt) {
    std::map<std::string, KeyOrigin> origins;
    RunConfig config = opt.config_path.empty() ? RunConfig{} : parse_config(opt.config_path, &origins);
    for (const std::string& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set", 0, "expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        apply_setting(config, key, kv.substr(eq + 1), "--set", 0);
        origins[key] = {"--set " + kv, 0};
    }
    if (!opt.out.empty()) config.output_dir = opt.out;
    if (opt.threads >= 0) config.run.threads = opt.threads;
    if (!opt.preset.empty()) config.sweep.preset = opt.preset;
    validate_config(config, origins);
    if (config.sweep.preset != "none") config = apply_preset(config, config.sweep.preset);
#ifdef _OPENMP
    if (config.run.threads > 0) omp_set_num_threads(config.run.threads);
#endif
    return config;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json config_echo(const RunConfig& config) {
    json out = json::object();
    const std::string text = serialize_config(config);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = text.substr(pos, nl - pos);
        const auto eq = line.find(" = ");
        out[line.substr(0, eq)] = line.substr(eq + 3);
        pos = nl + 1;
    }
    return out;
}

json base_manifest(const RunConfig& config, const std::string& command) {
    json m;
    m["command"] = command;
    m["schema"] = std::string(kCsvSchema);
    m["version"] = std::string(kLibraryVersion);
    m["compiler"] = __VERSION__;
    m["created_utc"] = utc_now();
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    m["threads"] = threads;
    m["config"] = config_echo(config);
    m["files"] = json::object();
    return m;
}

void write_csv(json& manifest, const fs::path& dir, const std::string& name, const std::string& text) {
    write_file_atomic(dir / name, text);
    manifest["files"][name] = content_digest(text);
}

void finish(json& manifest, const fs::path& dir, double seconds) {
    manifest["wall_seconds"] = seconds;
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

json model_json(const Model& m) {
    return {{"B", m.field.B},
            {"grid_hash", m.grid_hash},
            {"kernel_hash", m.kernel_hash},
            {"pph_nonzero", m.phonon.nonzero_count()},
            {"pp_channels", m.pp.channels.size()},
            {"degenerate_clamps", m.pp.degenerate_clamps},
            {"phonon_from_cache", m.phonon_from_cache},
            {"build_seconds", m.build_seconds}};
}

json stats_json(const IntegratorStats& s) {
    return {{"accepted", s.accepted},
            {"rejected", s.rejected},
            {"negative_rejections", s.negative_rejections},
            {"floored_values", s.floored_values},
            {"rhs_evaluations", s.rhs_evaluations}};
}

json threshold_json(const ThresholdResult& t) {
    json h = json::array();
    for (const auto& s : t.history) h.push_back({{"p0", s.p0}, {"n0", s.n0}, {"stationary", s.stationary}});
    return {{"found", t.found}, {"p_th", t.p_th}, {"n0", t.n0}, {"max_n0", t.max_n0},
            {"message", t.message}, {"history", h}};
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------

int cmd_dispersion(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = config.output_dir;
    json manifest = base_manifest(config, "dispersion");
    std::vector<double> fields = config.sweep.preset == "fig1" ? config.sweep.B : std::vector<double>{config.B};
    const std::size_t samples = 501;
    std::vector<double> ks(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        ks[i] = config.grid.k_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
    for (double B : fields) {
        const Dispersion disp(config.material, make_field_state(config.material, B));
        write_csv(manifest, dir, "dispersion_B" + fmt(B) + ".csv", dispersion_csv(disp, ks));
    }
    finish(manifest, dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return 0;
}

void write_run(json& manifest, const fs::path& dir, const std::string& stem, const Model& model,
               const RunConfig& config, const PointResult& r) {
    const bool snapshots = config.integrator.snapshot_interval > 0.0;
    write_csv(manifest, dir, stem + "_trajectory.csv",
              trajectory_csv(r.trajectory.samples, model.grid.size(), snapshots));
    write_csv(manifest, dir, stem + "_distribution.csv",
              distribution_csv(model.grid, r.trajectory.final_state.n));
    manifest["runs"][stem] = {{"p0", 0.0},
                              {"n0", r.n0},
                              {"N_tot", r.N_tot},
                              {"stationary", r.stationary.reached},
                              {"stationary_time", r.stationary.time},
                              {"integrator", stats_json(r.trajectory.stats)},
                              {"seconds", r.seconds}};
}

int cmd_run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = config.output_dir;
    json manifest = base_manifest(config, "run");
    const auto model = build_model(config, config.B);
    manifest["model"] = model_json(*model);
    const PointResult r = run_point(*model, config, config.pump);
    write_run(manifest, dir, "run", *model, config, r);
    manifest["runs"]["run"]["p0"] = config.pump.p0;
    finish(manifest, dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("n0 = %s  N_tot = %s  stationary = %s\n", fmt(r.n0).c_str(), fmt(r.N_tot).c_str(),
                r.stationary.reached ? "yes" : "no");
    return 0;
}

std::string threshold_csv(const ThresholdResult& t) {
    std::string out = "# " + std::string(kCsvSchema) + "\niteration,p0,n0,stationary\n";
    for (std::size_t i = 0; i < t.history.size(); ++i) {
        out += std::to_string(i) + "," + fmt(t.history[i].p0) + "," + fmt(t.history[i].n0) + "," +
               (t.history[i].stationary ? "1" : "0") + "\n";
    }
    return out;
}

std::string scurve_csv(const std::vector<ScurvePoint>& pts) {
    std::string out = "# " + std::string(kCsvSchema) + "\np_over_pth,p0,n0,N_tot,stationary,failed\n";
    for (const auto& p : pts) {
        out += fmt(p.multiplier) + "," + fmt(p.p0) + "," + fmt(p.n0) + "," + fmt(p.N_tot) + "," +
               (p.stationary ? "1" : "0") + "," + (p.failed ? "1" : "0") + "\n";
    }
    return out;
}

int cmd_threshold(const RunConfig& config, bool with_scurve) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = config.output_dir;
    json manifest = base_manifest(config, with_scurve ? "scurve" : "threshold");
    const auto model = build_model(config, config.B);
    manifest["model"] = model_json(*model);
    const ThresholdResult t = find_threshold(*model, config, config.pump.k_p);
    manifest["threshold"] = threshold_json(t);
    write_csv(manifest, dir, "threshold.csv", threshold_csv(t));
    if (!t.found) {
        finish(manifest, dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        std::fprintf(stderr, "polariton: no threshold found: %s\n", t.message.c_str());
        return kNumericalError;
    }
    std::printf("p_th = %s ps^-1 (n0 = %s)\n", fmt(t.p_th).c_str(), fmt(t.n0).c_str());
    if (with_scurve) {
        const auto pts = run_scurve(*model, config, config.pump.k_p, t.p_th, config.sweep.scurve_multipliers);
        write_csv(manifest, dir, "scurve.csv", scurve_csv(pts));
        if (config.sweep.preset == "fig2") {
            for (double mult : {0.5, 2.4}) {
                PumpSpec pump = config.pump;
                pump.p0 = mult * t.p_th;
                const PointResult r = run_point(*model, config, pump);
                const std::string stem = "p" + fmt(mult) + "pth";
                write_run(manifest, dir, stem, *model, config, r);
                manifest["runs"][stem]["p0"] = pump.p0;
            }
        }
    }
    finish(manifest, dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    if (config.sweep.preset == "fig1") return cmd_dispersion(config);
    if (config.sweep.preset == "fig2") return cmd_threshold(config, true);
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = config.output_dir;
    json manifest = base_manifest(config, "sweep");
    const SweepResult result = run_field_sweep(config);

    std::string csv = "# " + std::string(kCsvSchema) +
                      "\nB_T,k_p_nm_inv,p_over_pth,p0,p_th_ref,n0,N_tot,stationary_time_ps,converged,failed\n";
    json points = json::array();
    for (const auto& [key, r] : result.records) {
        csv += fmt(r.B) + "," + fmt(r.k_p) + "," + fmt(r.multiplier) + "," + fmt(r.p0) + "," +
               fmt(r.p_th_ref) + "," + fmt(r.n0) + "," + fmt(r.N_tot) + "," + fmt(r.stationary_time) +
               "," + (r.converged ? "1" : "0") + "," + (r.failed ? "1" : "0") + "\n";
        points.push_back({{"B", r.B}, {"k_p", r.k_p}, {"multiplier", r.multiplier},
                          {"seconds", r.seconds}, {"error", r.error}});
    }
    const std::string name = (config.sweep.preset == "none" ? std::string("sweep") : config.sweep.preset) + ".csv";
    write_csv(manifest, dir, name, csv);
    json refs = json::object();
    for (const auto& [k, t] : result.references) refs[fmt(k)] = threshold_json(t);
    manifest["references"] = refs;
    json hashes = json::object();
    for (const auto& [B, h] : result.kernel_hashes) hashes[fmt(B)] = h;
    manifest["kernel_hashes"] = hashes;
    manifest["points"] = points;
    finish(manifest, dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::size_t failed = 0;
    for (const auto& [key, r] : result.records) failed += r.failed ? 1 : 0;
    std::printf("%zu points, %zu failed\n", result.records.size(), failed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exciton-polariton condensation kinetics in a magnetic field"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Flat key = value configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--set", opt.overrides, "Override one key (key=value); repeatable");
        sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
        sub->add_option("--threads", opt.threads, "Worker threads (0 = runtime default)");
        sub->add_option("--preset", opt.preset, "Figure preset: fig1..fig5");
    };
    auto* dispersion = app.add_subcommand("dispersion", "Export dispersion tables");
    auto* run = app.add_subcommand("run", "Evolve one pump configuration to t_end");
    auto* threshold = app.add_subcommand("threshold", "Find the pump threshold p_th");
    auto* scurve = app.add_subcommand("scurve", "Threshold plus n0 against p / p_th");
    auto* sweep = app.add_subcommand("sweep", "Magnetic-field / pump-wavenumber sweep or preset");
    for (auto* sub : {dispersion, run, threshold, scurve, sweep}) add_common(sub);
    auto* keys = app.add_subcommand("keys", "Print every configuration key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (keys->parsed()) {
            std::cout << serialize_config(RunConfig{});
            return 0;
        }
        const RunConfig config = resolve(opt);
        if (dispersion->parsed()) return cmd_dispersion(config);
        if (run->parsed()) return cmd_run(config);
        if (threshold->parsed()) return cmd_threshold(config, false);
        if (scurve->parsed()) return cmd_threshold(config, true);
        if (sweep->parsed()) return cmd_sweep(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "polariton: configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "polariton: configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "polariton: numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "polariton: %s\n", e.what());
        return 1;
    }
    return 0;
}
