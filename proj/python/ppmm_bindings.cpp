#include <algorithm>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppmm/analysis.hpp"
#include "ppmm/csv.hpp"
#include "ppmm/curves.hpp"
#include "ppmm/error.hpp"
#include "ppmm/identification.hpp"
#include "ppmm/mechanisms.hpp"
#include "ppmm/selection.hpp"
#include "ppmm/serialize.hpp"
#include "ppmm/simulation.hpp"
#include "ppmm/validation.hpp"

namespace py = pybind11;
using namespace ppmm;

namespace {

// composite reports cross the boundary as plain dicts
py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<double> phi_grid_or_default(std::optional<std::vector<double>> grid) {
    return grid ? *grid : make_phi_grid(0.0, 1.0, 0.01);
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <class F>
py::array_t<double> elementwise(py::array_t<double> x, py::array_t<double> y, F f) {
    return py::vectorize(f)(std::move(x), std::move(y));
}

}  // namespace

PYBIND11_MODULE(_ppmm, m) {
    m.doc() = "Proxy pattern-mixture model: identification, implied selection model, sweeps and simulation";

    py::register_exception<Error>(m, "PpmmError", PyExc_ValueError);

    py::class_<PatternMoments>(m, "PatternMoments")
        .def(py::init([](double mu_x, double mu_y, double var_x, double var_y, double cov_xy) {
                 PatternMoments p{mu_x, mu_y, var_x, var_y, cov_xy};
                 validate_pattern_moments(p);
                 return p;
             }),
             py::arg("mu_x"), py::arg("mu_y"), py::arg("var_x"), py::arg("var_y"), py::arg("cov_xy"))
        .def_readonly("mu_x", &PatternMoments::mu_x)
        .def_readonly("mu_y", &PatternMoments::mu_y)
        .def_readonly("var_x", &PatternMoments::var_x)
        .def_readonly("var_y", &PatternMoments::var_y)
        .def_readonly("cov_xy", &PatternMoments::cov_xy)
        .def_property_readonly("correlation", &PatternMoments::correlation)
        .def("__repr__", [](const PatternMoments& p) { return "PatternMoments(" + json(p).dump() + ")"; });

    py::class_<ObservedSummary>(m, "ObservedSummary")
        .def(py::init([](const PatternMoments& respondent, double nonresp_mu_x, double nonresp_var_x, double pi) {
                 ObservedSummary s{respondent, nonresp_mu_x, nonresp_var_x, pi};
                 validate_observed_summary(s);
                 return s;
             }),
             py::arg("respondent"), py::arg("nonresp_mu_x"), py::arg("nonresp_var_x"), py::arg("pi"))
        .def_readonly("respondent", &ObservedSummary::respondent)
        .def_readonly("nonresp_mu_x", &ObservedSummary::nonresp_mu_x)
        .def_readonly("nonresp_var_x", &ObservedSummary::nonresp_var_x)
        .def_readonly("pi", &ObservedSummary::pi)
        .def("__repr__", [](const ObservedSummary& s) { return "ObservedSummary(" + json(s).dump() + ")"; });

    py::class_<Mechanism>(m, "Mechanism")
        .def_readonly("id", &Mechanism::id)
        .def_readonly("respondent", &Mechanism::respondent)
        .def_readonly("nonresp_mu_x", &Mechanism::nonresp_mu_x)
        .def_readonly("nonresp_var_x", &Mechanism::nonresp_var_x)
        .def_readonly("pi", &Mechanism::pi)
        .def("summary", &Mechanism::summary)
        .def("to_dict", [](const Mechanism& x) { return to_python(json(x)); })
        .def("__repr__", [](const Mechanism& x) { return "Mechanism(" + json(x).dump() + ")"; });

    py::class_<IdentifiedModel>(m, "IdentifiedModel")
        .def_readonly("respondent", &IdentifiedModel::respondent)
        .def_readonly("nonrespondent", &IdentifiedModel::nonrespondent)
        .def_readonly("pi", &IdentifiedModel::pi)
        .def_property_readonly("phi", [](const IdentifiedModel& x) { return x.phi.value(); })
        .def("to_dict", [](const IdentifiedModel& x) { return to_python(json(x)); });

    py::class_<SelectionCoefficients>(m, "SelectionCoefficients")
        .def_property_readonly("lambdas", [](const SelectionCoefficients& c) { return py::make_tuple(c[0], c[1], c[2], c[3], c[4], c[5]); })
        .def("logit", [](const SelectionCoefficients& c, py::array_t<double> x, py::array_t<double> y) {
            return elementwise(std::move(x), std::move(y), [c](double a, double b) { return logit_nonresponse(c, a, b); });
        }, py::arg("x"), py::arg("y"))
        .def("prob_nonresponse", [](const SelectionCoefficients& c, py::array_t<double> x, py::array_t<double> y) {
            return elementwise(std::move(x), std::move(y), [c](double a, double b) { return prob_nonresponse(c, a, b); });
        }, py::arg("x"), py::arg("y"))
        .def("odds_ratio", [](const SelectionCoefficients& c, py::array_t<double> x, py::array_t<double> y, double delta) {
            return elementwise(std::move(x), std::move(y),
                               [c, delta](double a, double b) { return odds_ratio_y(c, a, b, delta); });
        }, py::arg("x"), py::arg("y"), py::arg("delta") = 1.0)
        .def("__repr__", [](const SelectionCoefficients& c) { return "SelectionCoefficients(" + json(c).dump() + ")"; });

    m.def("builtin_mechanisms", &builtin_mechanisms, "The 18 mechanisms of the 3x2x3 factorial design.");
    m.def("builtin_mechanism", &builtin_mechanism, py::arg("id"));
    m.def("load_mechanisms", &load_mechanisms, py::arg("path"));
    m.def("parse_mechanisms", &parse_mechanisms, py::arg("text"));

    m.def("make_phi_grid", &make_phi_grid, py::arg("start") = 0.0, py::arg("stop") = 1.0, py::arg("step") = 0.01);
    m.def("g_factor", [](double phi, double rho) { return g_factor(Phi(phi), rho); }, py::arg("phi"), py::arg("rho"));
    m.def("identify", [](const ObservedSummary& s, double phi) { return identify(s, Phi(phi)); }, py::arg("summary"),
          py::arg("phi"));
    m.def("marginal_mean", &marginal_mean, py::arg("model"));
    m.def("phi_validity_bound", [](const ObservedSummary& s, double step) { return to_python(json(phi_validity_bound(s, step))); },
          py::arg("summary"), py::arg("step") = 0.01);
    m.def("lambda_coefficients", &lambda_coefficients, py::arg("model"));

    m.def("sweep_or",
          [](const ObservedSummary& s, std::optional<std::vector<double>> phi_grid,
             std::optional<std::vector<double>> y_levels, std::optional<double> x_fix, double delta, const std::string& id) {
              std::vector<OutcomeLevel> levels;
              if (y_levels) {
                  for (double y : *y_levels) levels.push_back({"y" + format_double(y), y});
              } else {
                  levels = standard_outcome_levels(s);
              }
              return to_python(json(sweep_or(s, id, phi_grid_or_default(phi_grid), levels, x_fix, delta)));
          },
          py::arg("summary"), py::arg("phi_grid") = py::none(), py::arg("y_levels") = py::none(),
          py::arg("x_fix") = py::none(), py::arg("delta") = 1.0, py::arg("id") = "");
    m.def("sweep_prob",
          [](const ObservedSummary& s, std::vector<double> phi_levels, std::vector<double> y_grid,
             std::optional<double> x_fix, const std::string& id) {
              return to_python(json(sweep_prob(s, id, phi_levels, y_grid, x_fix)));
          },
          py::arg("summary"), py::arg("phi_levels"), py::arg("y_grid"), py::arg("x_fix") = py::none(), py::arg("id") = "");
    m.def("sweep_mean",
          [](const ObservedSummary& s, std::optional<std::vector<double>> phi_grid, const std::string& id) {
              return to_python(json(sweep_mean(s, id, phi_grid_or_default(phi_grid))));
          },
          py::arg("summary"), py::arg("phi_grid") = py::none(), py::arg("id") = "");

    m.def("simulate",
          [](const IdentifiedModel& model, std::size_t n, std::uint64_t seed) {
              const auto ds = simulate(model, n, seed);
              py::dict out;
              out["x"] = to_array(ds.x);
              out["y"] = to_array(ds.y);
              out["r"] = to_array(ds.r);
              return out;
          },
          py::arg("model"), py::arg("n"), py::arg("seed"));
    m.def("mc_recover_lambdas",
          [](const IdentifiedModel& model, std::size_t n, std::uint64_t seed) {
              const auto rep = mc_recover_lambdas(model, n, seed);
              return to_python(json{{"converged", rep.fit.converged},
                                    {"iterations", rep.fit.iterations},
                                    {"nonrespondents", rep.nonrespondents},
                                    {"max_abs_z", rep.max_abs_z()},
                                    {"terms", rep.terms}});
          },
          py::arg("model"), py::arg("n"), py::arg("seed"));

    m.def("analyze",
          [](const std::string& path, const std::string& outcome, std::vector<std::string> outcome_sum,
             std::vector<std::string> exclude, std::optional<std::vector<double>> phi_grid, bool ml_variance) {
              AnalyzeOptions opt;
              opt.outcome = outcome;
              opt.outcome_sum = std::move(outcome_sum);
              opt.exclude = std::move(exclude);
              opt.phi_grid = phi_grid_or_default(phi_grid);
              opt.denominator = ml_variance ? VarianceDenominator::MaximumLikelihood : VarianceDenominator::Unbiased;
              return to_python(json(analyze(path, opt)));
          },
          py::arg("path"), py::arg("outcome") = "", py::arg("outcome_sum") = std::vector<std::string>{},
          py::arg("exclude") = std::vector<std::string>{}, py::arg("phi_grid") = py::none(),
          py::arg("ml_variance") = false);

    m.def("validate",
          [](std::vector<Mechanism> inputs, std::optional<std::vector<double>> phi_grid, bool run_mc,
             std::vector<std::string> mc_mechanisms, std::vector<double> mc_phis, std::size_t n_mc, std::uint64_t seed) {
              ValidationOptions opt;
              if (phi_grid) opt.phi_grid = *phi_grid;
              opt.run_mc = run_mc;
              opt.mc_mechanisms = std::move(mc_mechanisms);
              opt.mc_phis = std::move(mc_phis);
              opt.n_mc = n_mc;
              opt.seed = seed;
              return to_python(json(validate(inputs, opt)));
          },
          py::arg("mechanisms"), py::arg("phi_grid") = py::none(), py::arg("run_mc") = false,
          py::arg("mc_mechanisms") = std::vector<std::string>{}, py::arg("mc_phis") = std::vector<double>{0.5},
          py::arg("n_mc") = 200000, py::arg("seed") = 1);
}
