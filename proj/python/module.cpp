#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polariton/experiments.hpp"
#include "polariton/io.hpp"

namespace py = pybind11;
using namespace polariton;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::string config_value(const RunConfig& c, const std::string& key) {
    std::istringstream in(serialize_config(c));
    std::string line;
    const std::string prefix = key + " = ";
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    }
    throw py::key_error(key);
}

py::dict trajectory_dict(const Trajectory& tr) {
    std::vector<double> t, n0, N;
    for (const auto& s : tr.samples) {
        t.push_back(s.t);
        n0.push_back(s.n0);
        N.push_back(s.N_tot);
    }
    py::dict stats;
    stats["accepted"] = tr.stats.accepted;
    stats["rejected"] = tr.stats.rejected;
    stats["rhs_evaluations"] = tr.stats.rhs_evaluations;
    py::dict d;
    d["t"] = to_array(t);
    d["n0"] = to_array(n0);
    d["N_tot"] = to_array(N);
    d["occupations"] = to_array(tr.final_state.n);
    d["stats"] = stats;
    return d;
}

}  // namespace

PYBIND11_MODULE(_polariton, m) {
    m.doc() = "Exciton-polariton condensation kinetics in a magnetic field";
    m.attr("__version__") = std::string(kLibraryVersion);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<RunConfig>(m, "Config")
        .def(py::init<>())
        .def_static("from_text", [](const std::string& text) { return parse_config_text(text); })
        .def_static("from_file", [](const std::string& path) { return parse_config(path); })
        .def("set",
             [](RunConfig& c, const std::string& key, py::object value) {
                 const std::string text =
                     py::isinstance<py::str>(value) ? value.cast<std::string>()
                                                    : py::str(value).cast<std::string>();
                 apply_setting(c, key, text);
             })
        .def("get", &config_value)
        .def("validate", &RunConfig::validate)
        .def("to_text", &serialize_config)
        .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; })
        .def("__repr__", [](const RunConfig&) { return std::string("<polariton.Config>"); });
    m.def("config_keys", &config_keys);
    m.def("apply_preset", &apply_preset, py::arg("config"), py::arg("preset"));

    m.def(
        "field_state",
        [](const RunConfig& c, double B) {
            const FieldState f = make_field_state(c.material, B);
            py::dict d;
            d["B"] = f.B;
            d["delta_E"] = f.delta_E;
            d["exciton_mass"] = f.exciton_mass;
            d["radius_ratio"] = f.radius_ratio;
            d["rabi"] = f.rabi;
            d["binding"] = f.binding;
            return d;
        },
        py::arg("config"), py::arg("B"));

    m.def(
        "dispersion",
        [](const RunConfig& c, double B, const std::vector<double>& ks) {
            const Dispersion d(c.material, make_field_state(c.material, B));
            std::vector<double> E, x2, c2, tau, d1, d2;
            for (double k : ks) {
                const auto p = d.point(k);
                const auto der = d.derivatives(k);
                E.push_back(p.E_lp);
                x2.push_back(p.x2);
                c2.push_back(p.c2);
                tau.push_back(p.tau);
                d1.push_back(der.dE_dk);
                d2.push_back(der.d2E_dk2);
            }
            py::dict out;
            out["k"] = to_array(ks);
            out["E_lp"] = to_array(E);
            out["x2"] = to_array(x2);
            out["c2"] = to_array(c2);
            out["tau"] = to_array(tau);
            out["dE_dk"] = to_array(d1);
            out["d2E_dk2"] = to_array(d2);
            return out;
        },
        py::arg("config"), py::arg("B"), py::arg("k"));

    m.def("kinematic_R", &kinematic_R, py::arg("k"), py::arg("kp"), py::arg("k1"), py::arg("k2"));

    py::class_<Model, std::shared_ptr<Model>>(m, "Model")
        .def_property_readonly("k", [](const Model& md) { return to_array(md.grid.k()); })
        .def_property_readonly("weights", [](const Model& md) { return to_array(md.grid.weights()); })
        .def_property_readonly("energy",
                               [](const Model& md) {
                                   std::vector<double> e;
                                   for (const auto& p : md.grid.points()) e.push_back(p.E_lp);
                                   return to_array(e);
                               })
        .def_readonly("grid_hash", &Model::grid_hash)
        .def_readonly("kernel_hash", &Model::kernel_hash)
        .def_readonly("build_seconds", &Model::build_seconds)
        .def_property_readonly("pp_channels", [](const Model& md) { return md.pp.channels.size(); })
        .def_property_readonly("phonon_nonzero",
                               [](const Model& md) { return md.phonon.nonzero_count(); });

    m.def(
        "build_model",
        [](const RunConfig& c, double B) {
            std::shared_ptr<const Model> md;
            {
                py::gil_scoped_release release;
                md = build_model(c, B);
            }
            return std::const_pointer_cast<Model>(md);
        },
        py::arg("config"), py::arg("B"));

    m.def(
        "run_point",
        [](const Model& md, const RunConfig& c, double p0, std::optional<double> k_p) {
            PumpSpec pump = c.pump;
            pump.p0 = p0;
            if (k_p) pump.k_p = *k_p;
            PointResult r;
            {
                py::gil_scoped_release release;
                r = run_point(md, c, pump);
            }
            py::dict d = trajectory_dict(r.trajectory);
            d["n0_final"] = r.n0;
            d["N_tot_final"] = r.N_tot;
            d["stationary"] = r.stationary.reached;
            d["stationary_time"] = r.stationary.time;
            return d;
        },
        py::arg("model"), py::arg("config"), py::arg("p0"), py::arg("k_p") = py::none());

    m.def(
        "find_threshold",
        [](const Model& md, const RunConfig& c, double k_p) {
            ThresholdResult r;
            {
                py::gil_scoped_release release;
                r = find_threshold(md, c, k_p);
            }
            py::list history;
            for (const auto& h : r.history) history.append(py::make_tuple(h.p0, h.n0, h.stationary));
            py::dict d;
            d["found"] = r.found;
            d["p_th"] = r.p_th;
            d["n0"] = r.n0;
            d["max_n0"] = r.max_n0;
            d["history"] = history;
            d["message"] = r.message;
            return d;
        },
        py::arg("model"), py::arg("config"), py::arg("k_p"));

    m.def(
        "run_scurve",
        [](const Model& md, const RunConfig& c, double k_p, double p_th,
           const std::vector<double>& multipliers) {
            std::vector<ScurvePoint> pts;
            {
                py::gil_scoped_release release;
                pts = run_scurve(md, c, k_p, p_th, multipliers);
            }
            py::list out;
            for (const auto& p : pts) {
                py::dict d;
                d["multiplier"] = p.multiplier;
                d["p0"] = p.p0;
                d["n0"] = p.n0;
                d["N_tot"] = p.N_tot;
                d["stationary"] = p.stationary;
                d["failed"] = p.failed;
                d["error"] = p.error;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("config"), py::arg("k_p"), py::arg("p_th"),
        py::arg("multipliers"));
}
