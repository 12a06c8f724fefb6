#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascade/agent.hpp"
#include "cascade/approx.hpp"
#include "cascade/cli.hpp"
#include "cascade/sweep.hpp"

namespace py = pybind11;
using namespace cascade;

namespace {

py::dict row_dict(const SweepRow& r) {
    py::dict d;
    d["eps"] = r.eps;
    d["beta"] = r.beta;
    d["p"] = r.p;
    d["v"] = to_string(r.v);
    d["method"] = to_string(r.method);
    d["value"] = r.value;
    d["lower"] = r.lower;
    d["upper"] = r.upper;
    d["std_err"] = r.std_err;
    d["trials"] = r.trials;
    d["seed"] = r.seed;
    if (r.failed()) d["error"] = r.error;
    return d;
}

SweepRow row_from_dict(const py::dict& d) {
    SweepRow r;
    r.eps = d["eps"].cast<double>();
    if (d.contains("value") && !d["value"].is_none()) r.value = d["value"].cast<double>();
    return r;
}

}  // namespace

PYBIND11_MODULE(_cascade, m) {
    m.doc() = "Information cascades with fake agents";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", PyExc_ValueError);
    py::register_exception<UndecidedError>(m, "UndecidedError", PyExc_RuntimeError);

    py::enum_<Truth>(m, "Truth").value("G", Truth::Good).value("B", Truth::Bad);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double>(), py::arg("p"), py::arg("eps") = 0.0, py::arg("beta") = 0.0)
        .def_property_readonly("p", &ModelParams::p)
        .def_property_readonly("eps", &ModelParams::eps)
        .def_property_readonly("beta", &ModelParams::beta)
        .def("__repr__", [](const ModelParams& p) {
            std::ostringstream os;
            os << "ModelParams(p=" << p.p() << ", eps=" << p.eps() << ", beta=" << p.beta() << ")";
            return os.str();
        });

    py::class_<DerivedModel>(m, "DerivedModel")
        .def_readonly("a", &DerivedModel::a)
        .def_readonly("b", &DerivedModel::b)
        .def_readonly("alpha", &DerivedModel::alpha)
        .def_readonly("eta_y", &DerivedModel::eta_y)
        .def_readonly("eta_n", &DerivedModel::eta_n)
        .def_readonly("pf_g", &DerivedModel::pf_g)
        .def_readonly("pf_b", &DerivedModel::pf_b);

    py::class_<ProbInterval>(m, "ProbInterval")
        .def_readonly("y_lower", &ProbInterval::y_lower)
        .def_readonly("y_upper", &ProbInterval::y_upper)
        .def_readonly("n_mass", &ProbInterval::n_mass)
        .def_readonly("pending", &ProbInterval::pending)
        .def_property_readonly("width", &ProbInterval::width)
        .def_property_readonly("midpoint", &ProbInterval::midpoint)
        .def("__repr__", [](const ProbInterval& iv) {
            std::ostringstream os;
            os.precision(17);
            os << "ProbInterval(y_lower=" << iv.y_lower << ", y_upper=" << iv.y_upper << ")";
            return os.str();
        });

    py::class_<MCEstimate>(m, "MCEstimate")
        .def_readonly("p_hat", &MCEstimate::p_hat)
        .def_readonly("std_err", &MCEstimate::std_err)
        .def_readonly("trials", &MCEstimate::trials)
        .def_readonly("y_count", &MCEstimate::y_count)
        .def_readonly("undecided", &MCEstimate::undecided)
        .def_readonly("seed", &MCEstimate::seed);

    m.def("derive", &derive, py::arg("params"));
    m.def("bayesian_threshold", &bayesian_threshold, py::arg("p"), py::arg("beta"), py::arg("r"));
    m.def(
        "cascade_thresholds",
        [](double p, double beta, int r_max, int k_max) {
            std::vector<py::tuple> out;
            for (const ThresholdPoint& t : cascade_thresholds(p, beta, r_max, k_max))
                out.push_back(py::make_tuple(t.r, t.k, t.eps_value));
            return out;
        },
        py::arg("p"), py::arg("beta"), py::arg("r_max") = 10, py::arg("k_max") = 2,
        "List of (r, k, eps) with r * eta_y - k * eta_n = 1.");

    m.def("exact_interval", &exact_interval, py::arg("params"), py::arg("v"), py::arg("depth") = kDefaultDepth,
          py::call_guard<py::gil_scoped_release>());
    m.def("mc_estimate", &mc_estimate, py::arg("params"), py::arg("v"), py::arg("trials"), py::arg("seed"),
          py::arg("max_steps") = kDefaultMaxSteps, py::arg("workers") = 0u, py::call_guard<py::gil_scoped_release>());
    m.def("agent_mc_estimate", &agent_mc_estimate, py::arg("params"), py::arg("v"), py::arg("trials"),
          py::arg("seed"), py::arg("max_agents") = kDefaultMaxSteps, py::arg("workers") = 0u,
          py::call_guard<py::gil_scoped_release>());
    m.def("exhaustive_oracle", &exhaustive_oracle, py::arg("params"), py::arg("v"), py::arg("depth"),
          py::call_guard<py::gil_scoped_release>());
    m.def("tree_approx", &tree_approx, py::arg("params"), py::arg("v"), py::arg("m") = 10,
          py::arg("depth_cap") = kDefaultDepth, py::call_guard<py::gil_scoped_release>());
    m.def("sequence_lower_bound", &sequence_lower_bound, py::arg("params"), py::arg("v"), py::arg("m") = 10,
          py::arg("max_length") = kDefaultDepth, py::call_guard<py::gil_scoped_release>());

    m.def(
        "sweep_eps",
        [](double p, double beta, const std::string& v, double start, double stop, double step,
           const std::string& method, std::int64_t trials, std::uint64_t seed, int depth, int iters) {
            SweepSpec spec;
            spec.p = p;
            spec.beta = beta;
            spec.v = parse_truth(v);
            spec.eps_grid = {start, stop, step};
            spec.method = parse_method(method);
            spec.trials = trials;
            spec.seed = seed;
            spec.depth = depth;
            spec.iters = iters;
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = sweep_eps(spec);
            }
            py::list out;
            for (const SweepRow& r : rows) out.append(row_dict(r));
            return out;
        },
        py::arg("p"), py::arg("beta"), py::arg("v") = "B", py::arg("start") = 0.0, py::arg("stop"),
        py::arg("step") = 0.005, py::arg("method") = "exact", py::arg("trials") = 100'000, py::arg("seed") = 1,
        py::arg("depth") = kDefaultDepth, py::arg("iters") = 10, "Rows are dicts with the CSV table columns.");

    m.def(
        "detect_drops",
        [](const std::vector<py::dict>& rows, double min_jump) {
            std::vector<SweepRow> in;
            for (const auto& d : rows) in.push_back(row_from_dict(d));
            std::vector<py::tuple> out;
            for (const Drop& d : detect_drops(in, min_jump)) out.push_back(py::make_tuple(d.eps_location, d.jump));
            return out;
        },
        py::arg("rows"), py::arg("min_jump") = 0.02, "List of (eps_location, jump).");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"cascade"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr).");
}
