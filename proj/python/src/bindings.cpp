#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neqt/config_io.hpp"
#include "neqt/correlators.hpp"
#include "neqt/hartree_fock.hpp"
#include "neqt/leads.hpp"
#include "neqt/oracle.hpp"
#include "neqt/spectral.hpp"
#include "neqt/transport.hpp"

namespace py = pybind11;
using namespace neqt;

namespace {

QuadratureSpec quad(double tol)
{
    QuadratureSpec q;
    q.abs_tol = tol;
    return q;
}

Site to_site(const py::object& s)
{
    if (py::isinstance<py::int_>(s)) return Site::sample(s.cast<int>());
    const auto t = s.cast<std::pair<int, int>>();
    return Site::on_lead(t.first, t.second);
}

std::vector<Site> to_sites(const py::list& items)
{
    std::vector<Site> out;
    for (const auto& s : items) out.push_back(to_site(py::reinterpret_borrow<py::object>(s)));
    return out;
}

OracleConfig oracle_config(const py::dict& kw)
{
    OracleConfig oc;
    for (const auto& [key, value] : kw) {
        const auto k = key.cast<std::string>();
        if (k == "lead_length") oc.lead_length = value.cast<int>();
        else if (k == "t_max") oc.t_max = value.cast<double>();
        else if (k == "dt") oc.dt = value.cast<double>();
        else if (k == "ramp") oc.ramp = parse_ramp_profile(value.cast<std::string>());
        else if (k == "ramp_duration") oc.ramp_duration = value.cast<double>();
        else if (k == "ramp_step") oc.ramp_step = value.cast<double>();
        else if (k == "enforce_recurrence") oc.enforce_recurrence = value.cast<bool>();
        else if (k == "sample_state") oc.sample_state = parse_sample_state(value.cast<std::string>());
        else if (k == "seed") oc.seed = value.cast<std::uint64_t>();
        else throw py::key_error("unknown oracle option '" + k + "'");
    }
    return oc;
}

py::dict plateau_dict(const Plateau& p)
{
    py::dict d;
    d["value"] = p.value;
    d["slope"] = p.slope;
    d["t_lo"] = p.t_lo;
    d["t_hi"] = p.t_hi;
    d["accepted"] = p.accepted;
    return d;
}

py::dict run_dict(const OracleRun& r)
{
    py::dict d;
    d["times"] = r.times;
    d["charge"] = r.charge;
    d["energy"] = r.energy;
    d["density"] = r.density;
    py::list cp, ep;
    for (const auto& p : r.charge_plateaus) cp.append(plateau_dict(p));
    for (const auto& p : r.energy_plateaus) ep.append(plateau_dict(p));
    d["charge_plateaus"] = cp;
    d["energy_plateaus"] = ep;
    d["t_rec"] = r.t_rec;
    d["particle_drift"] = r.particle_drift;
    return d;
}

} // namespace

PYBIND11_MODULE(_neqt, m)
{
    m.doc() = "Steady-state transport through a sample coupled to tight-binding leads";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    py::class_<SystemConfig>(m, "System")
        .def_static("from_json", &parse_config, py::arg("text"))
        .def_static("load", &load_config, py::arg("path"))
        .def("to_json", [](const SystemConfig& c) { return config_to_json(c).dump(); })
        .def("validate", [](const SystemConfig& c) { return validate(c).violations; })
        .def_property_readonly("n_sites", &SystemConfig::n_sites)
        .def_property_readonly("n_leads", &SystemConfig::n_leads)
        .def_property_readonly("hash", [](const SystemConfig& c) { return hex_hash(config_hash(c)); });

    m.def("surface_green", &surface_green, py::arg("E"), py::arg("v"), py::arg("c"));

    m.def(
        "check_spectral_condition",
        [](const SystemConfig& c, int grid) {
            ScanSpec s;
            s.grid_points = grid;
            const auto r = check_spectral_condition(c, s);
            py::dict d;
            d["passed"] = r.passed;
            std::vector<std::pair<double, double>> v;
            for (const auto& p : r.violations) v.emplace_back(p.E, p.sigma_min);
            d["violations"] = v;
            d["window"] = std::make_pair(r.E_lo, r.E_hi);
            return d;
        },
        py::arg("system"), py::arg("grid_points") = 2048);

    m.def("sample_resolvent", [](const SystemConfig& c, double E) { return sample_resolvent(c, E).matrix; });
    m.def("transmission", [](const SystemConfig& c, double E) { return transmission(c, E).T; });

    m.def(
        "currents",
        [](const SystemConfig& c, double tol) {
            const auto o = lb_currents(c, quad(tol));
            py::dict d;
            d["J"] = o.J;
            d["E"] = o.Eflux;
            d["sigma"] = o.sigma;
            return d;
        },
        py::arg("system"), py::arg("tol") = 1e-10);

    m.def(
        "entropy_production",
        [](const SystemConfig& c, double tol) {
            const auto r = entropy_production(c, quad(tol));
            return std::make_pair(r.sigma, r.strictly_positive);
        },
        py::arg("system"), py::arg("tol") = 1e-10);

    m.def(
        "onsager_matrix", [](const SystemConfig& c, double step) { return onsager_matrix(c, step).L; }, py::arg("system"),
        py::arg("step") = -1.0);

    m.def(
        "density_matrix",
        [](const SystemConfig& c, const py::list& sites, double tol) { return ness_density_matrix(c, to_sites(sites), quad(tol)).values; },
        py::arg("system"), py::arg("sites"), py::arg("tol") = 1e-10,
        "Sites are ints (sample) or (lead, index) pairs; entry (a, b) is <a^dagger_b a_a>.");

    m.def(
        "green_functions",
        [](const SystemConfig& c, double t, const py::object& x, const py::object& y) {
            const auto g = green_functions(c, t, to_site(x), to_site(y));
            py::dict d;
            d["lesser"] = g.lesser;
            d["greater"] = g.greater;
            d["retarded"] = g.retarded;
            d["advanced"] = g.advanced;
            return d;
        },
        py::arg("system"), py::arg("t"), py::arg("x"), py::arg("y"));

    m.def("fourier_lesser", [](const SystemConfig& c, const std::vector<double>& w, const py::object& x, const py::object& y) {
        return fourier_lesser(c, w, to_site(x), to_site(y));
    });

    m.def("hartree_fock_potential", [](const SystemConfig& c) { return build_potential(c).v_HF; });
    m.def("hartree_fock_system", [](const SystemConfig& c) { return hf_system(c); });

    m.def("evolve_free", [](const SystemConfig& c, const py::kwargs& kw) { return run_dict(evolve_free(c, oracle_config(kw))); });
    m.def("evolve_interacting",
          [](const SystemConfig& c, const py::kwargs& kw) { return run_dict(evolve_interacting(c, oracle_config(kw))); });
    m.def("evolve_adiabatic",
          [](const SystemConfig& c, const py::kwargs& kw) { return run_dict(evolve_adiabatic(c, oracle_config(kw))); });
}
