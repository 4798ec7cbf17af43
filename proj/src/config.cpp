#include "polariton/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "polariton/io.hpp"

namespace polariton {

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
    }
    if (!std::isfinite(v)) throw std::invalid_argument("value must be finite");
    return v;
}

long long parse_int(std::string_view text) {
    text = trim(text);
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_double(text.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

std::string_view binding_name(BindingLaw law) {
    return law == BindingLaw::inverse_radius ? "inverse_radius" : "constant";
}

BindingLaw binding_from(std::string_view s) {
    s = trim(s);
    if (s == "inverse_radius") return BindingLaw::inverse_radius;
    if (s == "constant") return BindingLaw::constant;
    throw std::invalid_argument("binding law must be inverse_radius or constant");
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

Key number(std::string name, double RunConfig::*outer) {
    return {std::move(name), [outer](RunConfig& c, std::string_view v) { c.*outer = parse_double(v); },
            [outer](const RunConfig& c) { return format_double(c.*outer); }};
}

template <class Outer>
Key number(std::string name, Outer RunConfig::*group, double Outer::*field) {
    return {std::move(name),
            [group, field](RunConfig& c, std::string_view v) { (c.*group).*field = parse_double(v); },
            [group, field](const RunConfig& c) { return format_double((c.*group).*field); }};
}

template <class Outer, class Int>
Key integer(std::string name, Outer RunConfig::*group, Int Outer::*field, long long lo) {
    return {std::move(name),
            [group, field, lo](RunConfig& c, std::string_view v) {
                const long long x = parse_int(v);
                if (x < lo) throw std::invalid_argument("must be at least " + std::to_string(lo));
                (c.*group).*field = static_cast<Int>(x);
            },
            [group, field](const RunConfig& c) { return std::to_string((c.*group).*field); }};
}

template <class Outer>
Key flag(std::string name, Outer RunConfig::*group, bool Outer::*field) {
    return {std::move(name),
            [group, field](RunConfig& c, std::string_view v) { (c.*group).*field = parse_bool(v); },
            [group, field](const RunConfig& c) { return std::string((c.*group).*field ? "true" : "false"); }};
}

template <class Outer>
Key list(std::string name, Outer RunConfig::*group, std::vector<double> Outer::*field) {
    return {std::move(name),
            [group, field](RunConfig& c, std::string_view v) { (c.*group).*field = parse_list(v); },
            [group, field](const RunConfig& c) { return format_list((c.*group).*field); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        using M = MaterialSet;
        std::vector<Key> k;
        k.push_back(number("material.m_e", &RunConfig::material, &M::electron_mass));
        k.push_back(number("material.m_h", &RunConfig::material, &M::hole_mass));
        k.push_back(number("material.eps_b", &RunConfig::material, &M::dielectric_const));
        k.push_back(number("material.L_z", &RunConfig::material, &M::qw_thickness));
        k.push_back(number("material.S", &RunConfig::material, &M::qw_area));
        k.push_back(number("material.rho", &RunConfig::material, &M::mass_density));
        k.push_back(number("material.u_s", &RunConfig::material, &M::sound_velocity));
        k.push_back(number("material.d_e", &RunConfig::material, &M::deformation_potential_e));
        k.push_back(number("material.d_h", &RunConfig::material, &M::deformation_potential_h));
        k.push_back(number("material.a0", &RunConfig::material, &M::bohr_radius));
        k.push_back(number("material.E0", &RunConfig::material, &M::binding_energy));
        k.push_back(number("material.hbar_omega_t", &RunConfig::material, &M::exciton_line));
        k.push_back(number("material.hbar_omega_0", &RunConfig::material, &M::photon_floor));
        k.push_back(number("material.Omega_X", &RunConfig::material, &M::rabi_splitting));
        k.push_back(number("material.tau_c", &RunConfig::material, &M::photon_lifetime));
        k.push_back(number("material.tau_x", &RunConfig::material, &M::exciton_lifetime));
        k.push_back(number("material.T", &RunConfig::material, &M::temperature));
        k.push_back(number("material.D2", &RunConfig::material, &M::shift_coeff));
        k.push_back(number("material.D_M", &RunConfig::material, &M::mass_coeff));
        k.push_back({"material.binding_law",
                     [](RunConfig& c, std::string_view v) { c.material.binding_law = binding_from(v); },
                     [](const RunConfig& c) { return std::string(binding_name(c.material.binding_law)); }});

        k.push_back(integer("grid.N", &RunConfig::grid, &GridSettings::N, 16));
        k.push_back(number("grid.k_max", &RunConfig::grid, &GridSettings::k_max));
        k.push_back({"grid.spacing",
                     [](RunConfig& c, std::string_view v) { c.grid.spacing = spacing_from_string(trim(v)); },
                     [](const RunConfig& c) { return std::string(to_string(c.grid.spacing)); }});

        k.push_back(number("field.B", &RunConfig::B));

        k.push_back(number("pump.p0", &RunConfig::pump, &PumpSpec::p0));
        k.push_back(number("pump.k_p", &RunConfig::pump, &PumpSpec::k_p));
        k.push_back(number("pump.Gamma", &RunConfig::pump, &PumpSpec::width));
        k.push_back(number("pump.t0", &RunConfig::pump, &PumpSpec::t0));

        using I = IntegratorSettings;
        k.push_back({"integrator.method",
                     [](RunConfig& c, std::string_view v) { c.integrator.method = method_from_string(trim(v)); },
                     [](const RunConfig& c) { return std::string(to_string(c.integrator.method)); }});
        k.push_back(number("integrator.rel_tol", &RunConfig::integrator, &I::rel_tol));
        k.push_back(number("integrator.abs_tol", &RunConfig::integrator, &I::abs_tol));
        k.push_back(number("integrator.initial_step", &RunConfig::integrator, &I::initial_step));
        k.push_back(number("integrator.max_step", &RunConfig::integrator, &I::max_step));
        k.push_back(number("integrator.min_step", &RunConfig::integrator, &I::min_step));
        k.push_back(number("integrator.negative_floor", &RunConfig::integrator, &I::negative_floor));

        k.push_back(number("run.t_end", &RunConfig::run, &RunSettings::t_end));
        k.push_back(number("run.output_interval", &RunConfig::integrator, &I::output_interval));
        k.push_back(number("run.snapshot_interval", &RunConfig::integrator, &I::snapshot_interval));
        k.push_back(integer("run.threads", &RunConfig::run, &RunSettings::threads, 0));

        k.push_back(number("stationary.window", &RunConfig::stationary, &StationarySettings::window));
        k.push_back(number("stationary.eps", &RunConfig::stationary, &StationarySettings::eps));

        k.push_back(flag("physics.pp", &RunConfig::terms, &Terms::pp));
        k.push_back(flag("physics.pph", &RunConfig::terms, &Terms::pph));

        using T = ThresholdSettings;
        k.push_back(number("threshold.p_min", &RunConfig::threshold, &T::p_min));
        k.push_back(number("threshold.p_max", &RunConfig::threshold, &T::p_max));
        k.push_back(integer("threshold.max_iterations", &RunConfig::threshold, &T::max_iterations, 1));
        k.push_back(number("threshold.target", &RunConfig::threshold, &T::target));
        k.push_back(number("threshold.tolerance", &RunConfig::threshold, &T::tolerance));

        k.push_back({"experiment.preset",
                     [](RunConfig& c, std::string_view v) { c.sweep.preset = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.sweep.preset; }});
        k.push_back(list("sweep.B", &RunConfig::sweep, &SweepSettings::B));
        k.push_back(list("sweep.k_p", &RunConfig::sweep, &SweepSettings::k_p));
        k.push_back(list("sweep.p_multipliers", &RunConfig::sweep, &SweepSettings::p_multipliers));
        k.push_back(flag("sweep.rereference", &RunConfig::sweep, &SweepSettings::rereference));
        k.push_back(number("sweep.reference_k_p", &RunConfig::sweep, &SweepSettings::reference_k_p));
        k.push_back(list("scurve.multipliers", &RunConfig::sweep, &SweepSettings::scurve_multipliers));

        k.push_back({"output.dir",
                     [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.output_dir; }});
        k.push_back({"kernel.cache_dir",
                     [](RunConfig& c, std::string_view v) { c.kernel_cache_dir = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.kernel_cache_dir; }});
        return k;
    }();
    return table;
}

const std::vector<std::string> kPresets = {"none", "fig1", "fig2", "fig3", "fig4", "fig5"};

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   std::string_view source, std::size_t line) {
    key = trim(key);
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) {
        throw ConfigError(std::string(source), line, "unknown key '" + std::string(key) + "'");
    }
    try {
        it->set(config, value);
    } catch (const std::exception& e) {
        throw ConfigError(std::string(source), line, std::string(key) + ": " + e.what());
    }
}

RunConfig parse_config_text(std::string_view text, std::string_view source,
                            std::map<std::string, KeyOrigin>* origins) {
    RunConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(source), line_no, "expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        apply_setting(config, key, line.substr(eq + 1), source, line_no);
        if (origins) (*origins)[std::string(key)] = {std::string(source), line_no};
    }
    return config;
}

RunConfig parse_config(const std::filesystem::path& path, std::map<std::string, KeyOrigin>* origins) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), origins);
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const Key& k : keys()) out += k.name + " = " + k.get(config) + "\n";
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const Key& k : keys()) out.push_back(k.name);
    return out;
}

namespace {

struct Invalid {
    std::string key;
    std::string message;
};

void check(const RunConfig& c) {
    auto fail = [](std::string key, std::string msg) { throw Invalid{std::move(key), std::move(msg)}; };
    const MaterialSet& m = c.material;
    try {
        m.validate();
    } catch (const DomainError& e) {
        fail("material", e.what());
    }
    try {
        c.pump.validate();
    } catch (const DomainError& e) {
        fail("pump", e.what());
    }
    try {
        c.integrator.validate();
    } catch (const DomainError& e) {
        fail("integrator.rel_tol", e.what());
    }
    const double pole = m.mass_pole_field();
    if (c.sweep.B.empty() || c.sweep.k_p.empty() || c.sweep.p_multipliers.empty()) {
        fail("sweep.B", "sweep axes must be non-empty");
    }
    if (c.grid.N < 16) fail("grid.N", "grid.N must be at least 16");
    if (!(c.grid.k_max > 0.0)) fail("grid.k_max", "grid.k_max must be positive");
    if (!(c.B >= 0.0)) fail("field.B", "field.B must be non-negative");
    if (!(c.B < pole)) {
        fail("field.B", "field.B = " + format_double(c.B) +
                            " T lies at or beyond the exciton mass pole (" + format_double(pole) + " T)");
    }
    for (double b : c.sweep.B) {
        if (!(b >= 0.0 && b < pole)) {
            fail("sweep.B", "sweep.B value " + format_double(b) + " T is outside [0, " +
                                format_double(pole) + ")");
        }
    }
    for (double k : c.sweep.k_p) {
        if (!(k >= 0.0 && k <= c.grid.k_max)) fail("sweep.k_p", "sweep.k_p values must lie in [0, grid.k_max]");
    }
    if (c.sweep.reference_k_p > c.grid.k_max) {
        fail("sweep.reference_k_p", "sweep.reference_k_p lies outside the grid");
    }
    for (double x : c.sweep.p_multipliers) {
        if (!(x > 0.0)) fail("sweep.p_multipliers", "sweep.p_multipliers must be positive");
    }
    for (double x : c.sweep.scurve_multipliers) {
        if (!(x > 0.0)) fail("scurve.multipliers", "scurve.multipliers must be positive");
    }
    if (c.pump.k_p > c.grid.k_max) fail("pump.k_p", "pump.k_p lies outside the grid");
    if (!(c.run.t_end > 0.0)) fail("run.t_end", "run.t_end must be positive");
    if (!(c.stationary.window > 0.0)) fail("stationary.window", "stationary.window must be positive");
    if (!(c.stationary.eps > 0.0)) fail("stationary.eps", "stationary.eps must be positive");
    if (!(c.threshold.p_min > 0.0 && c.threshold.p_max > c.threshold.p_min)) {
        fail("threshold.p_max", "threshold bounds must satisfy 0 < p_min < p_max");
    }
    if (!(c.threshold.target > 0.0)) fail("threshold.target", "threshold.target must be positive");
    if (!(c.threshold.tolerance > 0.0 && c.threshold.tolerance < 1.0)) {
        fail("threshold.tolerance", "threshold.tolerance must lie in (0, 1)");
    }
    if (std::find(kPresets.begin(), kPresets.end(), c.sweep.preset) == kPresets.end()) {
        fail("experiment.preset", "unknown experiment.preset '" + c.sweep.preset + "'");
    }
    if (c.output_dir.empty()) fail("output.dir", "output.dir must not be empty");
}

}  // namespace

void RunConfig::validate() const {
    try {
        check(*this);
    } catch (const Invalid& e) {
        throw ConfigError("config", 0, e.message);
    }
}

void validate_config(const RunConfig& config, const std::map<std::string, KeyOrigin>& origins) {
    try {
        check(config);
    } catch (const Invalid& e) {
        // Point at the line that set the offending key, or the closest related one.
        for (const auto& [key, origin] : origins) {
            if (key == e.key || (key.rfind(e.key + ".", 0) == 0)) {
                throw ConfigError(origin.source, origin.line, e.message);
            }
        }
        throw ConfigError("config", 0, e.message);
    }
}

}  // namespace polariton
