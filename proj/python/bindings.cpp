// Python bindings for the phasepath library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phasepath/acceptance.hpp"
#include "phasepath/analysis.hpp"
#include "phasepath/config.hpp"
#include "phasepath/errors.hpp"
#include "phasepath/inequality.hpp"
#include "phasepath/pipeline.hpp"
#include "phasepath/wigner.hpp"

namespace py = pybind11;
using namespace phasepath;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> axis_values(const GridSpec& g) {
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = g.at(i);
    return to_array(v);
}

}  // namespace

PYBIND11_MODULE(_phasepath, m) {
    m.doc() = "Propagation inequality, Wigner phase space and scan analysis";

    auto base = py::register_exception<Error>(m, "PhasepathError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<MissingPlane>(m, "MissingPlane", base.ptr());
    py::register_exception<OverlapOutOfRange>(m, "OverlapOutOfRange", base.ptr());
    py::register_exception<AreaOutOfRange>(m, "AreaOutOfRange", base.ptr());
    py::register_exception<FitDiverged>(m, "FitDiverged", base.ptr());

    py::class_<NaturalUnits>(m, "NaturalUnits")
        .def(py::init<>())
        .def_static("from_sigma", &NaturalUnits::from_sigma, py::arg("sigma"), py::arg("L") = 1.0)
        .def_readwrite("L", &NaturalUnits::L)
        .def_readwrite("B", &NaturalUnits::B)
        .def_property_readonly("sigma", &NaturalUnits::sigma)
        .def_property_readonly("t_M", &NaturalUnits::t_M)
        .def_property_readonly("M", &NaturalUnits::M);

    py::class_<LabParams>(m, "LabParams")
        .def(py::init<>())
        .def_readwrite("wavelength", &LabParams::wavelength)
        .def_readwrite("slit_width_d", &LabParams::slit_width_d)
        .def_readwrite("focal_length_f", &LabParams::focal_length_f)
        .def_property_readonly("sigma", &LabParams::sigma)
        .def_property_readonly("first_minimum", &LabParams::first_minimum)
        .def_property_readonly("focal_scale", &LabParams::focal_scale)
        .def("natural", &LabParams::natural);

    py::class_<QuasiProbabilities>(m, "QuasiProbabilities")
        .def(py::init<double, double, double>(), py::arg("w_L"), py::arg("w_B"), py::arg("w_inter"))
        .def_readwrite("w_L", &QuasiProbabilities::w_L)
        .def_readwrite("w_B", &QuasiProbabilities::w_B)
        .def_readwrite("w_inter", &QuasiProbabilities::w_inter)
        .def("sum", &QuasiProbabilities::sum)
        .def_static("pure_superposition", &QuasiProbabilities::pure_superposition, py::arg("overlap"))
        .def("__repr__", [](const QuasiProbabilities& q) {
            return "QuasiProbabilities(w_L=" + std::to_string(q.w_L) + ", w_B=" + std::to_string(q.w_B) +
                   ", w_inter=" + std::to_string(q.w_inter) + ")";
        });

    py::class_<PropagationTriple>(m, "PropagationTriple")
        .def_static("make", py::overload_cast<double, double, double, const NaturalUnits&>(&PropagationTriple::make),
                    py::arg("P_L"), py::arg("P_B"), py::arg("P_M"), py::arg("units") = NaturalUnits{})
        .def_readonly("P_L", &PropagationTriple::P_L)
        .def_readonly("P_B", &PropagationTriple::P_B)
        .def_readonly("P_M", &PropagationTriple::P_M);

    m.def("defect_probability", &defect_probability, py::arg("triple"));
    m.def("minimal_joint_probability", &minimal_joint_probability, py::arg("P_L"), py::arg("P_B"));
    m.def("ideal_triple", py::overload_cast<const NaturalUnits&>(&ideal_triple), py::arg("units"));
    m.def(
        "defect_sweep",
        [](const std::vector<double>& sigmas, int cells_in_L, int cells_in_B) {
            const SweepResult r = defect_sweep(sigmas, cells_in_L, cells_in_B);
            std::vector<double> d;
            for (const auto& p : r.points) d.push_back(p.defect);
            return py::make_tuple(to_array(d), r.sigma_at_max, r.max_defect);
        },
        py::arg("sigmas"), py::arg("cells_in_L") = 45, py::arg("cells_in_B") = 45,
        "Defects at each sigma, the refined sigma of the maximum and its value.");

    py::class_<RegionReport>(m, "RegionReport")
        .def_readonly("L", &RegionReport::L)
        .def_readonly("B", &RegionReport::B)
        .def_readonly("t_M", &RegionReport::t_M)
        .def_readonly("M", &RegionReport::M)
        .def_readonly("P_L", &RegionReport::P_L)
        .def_readonly("P_B", &RegionReport::P_B)
        .def_readonly("P_M", &RegionReport::P_M)
        .def_readonly("W_LB", &RegionReport::W_LB)
        .def_readonly("W_in", &RegionReport::W_in)
        .def_readonly("W_out", &RegionReport::W_out)
        .def_readonly("W_diag", &RegionReport::W_diag)
        .def_readonly("total", &RegionReport::total);
    m.def("bound_report", &bound_report, py::arg("triple"));

    m.def("quasi_from_marginals", &quasi_from_marginals, py::arg("P_L"), py::arg("P_B"), py::arg("overlap_sq"));
    m.def(
        "quasi_from_envelope",
        [](double S) {
            const EnvelopeQuasi e = quasi_from_envelope(S);
            return py::make_tuple(e.w_inter, e.overlap);
        },
        py::arg("area_S"), "(w_inter, |<B|L>|) from the envelope area.");
    m.def(
        "predict_PM",
        [](const QuasiProbabilities& q, double overlap) {
            const PMPrediction p = predict_PM(q, overlap);
            return py::make_tuple(p.total, p.contribution_LB, p.contribution_inter);
        },
        py::arg("weights"), py::arg("overlap"), "(total, state part, interference part).");

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_static("parse", &parse_config, py::arg("text"))
        .def_static("load", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"))
        .def("to_toml", &config_to_toml)
        .def_readwrite("lab", &RunConfig::lab)
        .def_property(
            "seed", [](const RunConfig& c) { return c.detector.rng_seed; },
            [](RunConfig& c, std::uint64_t s) { c.detector.rng_seed = s; })
        .def_property(
            "state", [](const RunConfig& c) { return state_kind_label(c.state.kind); },
            [](RunConfig& c, const std::string& kind) { c.state.kind = state_kind_from_label(kind); })
        .def_property(
            "weights", [](const RunConfig& c) { return c.state.weights; },
            [](RunConfig& c, const QuasiProbabilities& q) { c.state.weights = q; });

    m.def(
        "wigner",
        [](const RunConfig& c) {
            const WignerGrid w = configured_wigner(c);
            py::array_t<double> values({w.p_axis().n, w.x_axis().n});
            std::copy(w.values().begin(), w.values().end(), values.mutable_data());
            return py::make_tuple(axis_values(w.x_axis()), axis_values(w.p_axis()), values, configured_regions(w, c));
        },
        py::arg("config"), "(x axis, p axis, W[p, x], region report) of the configured state, natural units.");

    m.def(
        "plane_densities",
        [](const RunConfig& c) {
            const PlaneDensities d = plane_densities(c);
            py::dict out;
            for (Plane p : {Plane::t0_position, Plane::t0_momentum, Plane::t_M}) {
                const SampledDensity& s = d.at(p);
                out[py::str(plane_label(p))] = py::make_tuple(axis_values(s.axis_um), to_array(s.per_um));
            }
            return out;
        },
        py::arg("config"), "Lab-plane densities (positions in um, density per um) keyed by plane label.");

    m.def(
        "simulate",
        [](const RunConfig& c, const std::string& plane, const std::filesystem::path& out) {
            return cmd_simulate(c, plane_from_label(plane), out);
        },
        py::arg("config"), py::arg("plane"), py::arg("out_dir"));
    m.def("analyze_files", &cmd_analyze, py::arg("config"), py::arg("scans"), py::arg("out_dir"),
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "analyze_json",
        [](const RunConfig& c, const std::vector<std::filesystem::path>& paths) {
            std::vector<ScanRecord> scans;
            for (const auto& p : paths) scans.push_back(read_scan(p));
            AnalysisConfig a = c.analysis;
            a.lab = c.lab;
            return report_to_json(analyze_scans(scans, a));
        },
        py::arg("config"), py::arg("scans"));
    m.def("wigner_files", &cmd_wigner, py::arg("config"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
    m.def("reproduce", &cmd_reproduce, py::arg("config"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "acceptance_json",
        [](std::uint64_t seed, const std::vector<int>& which) {
            AcceptanceOptions o;
            o.seed = seed;
            std::vector<CriterionResult> r;
            {
                py::gil_scoped_release release;
                r = run_acceptance(o, which);
            }
            return acceptance_json(r, true);
        },
        py::arg("seed") = 7, py::arg("which") = std::vector<int>{});
}
