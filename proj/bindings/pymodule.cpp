#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "wildqr/bootstrap.hpp"
#include "wildqr/montecarlo.hpp"
#include "wildqr/penalty.hpp"
#include "wildqr/rng.hpp"
#include "wildqr/solver.hpp"
#include "wildqr/tuning.hpp"
#include "wildqr/weight_laws.hpp"

namespace py = pybind11;
using namespace wildqr;

namespace {

using Params = std::map<std::string, double>;

// y plus a covariate matrix without the intercept column; the ones column is
// prepended here, mirroring the CSV reader.
Dataset build_dataset(const VectorXd& y, const MatrixXd& covariates,
                      std::vector<std::string> names) {
  MatrixXd x(covariates.rows(), covariates.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(covariates.cols()) = covariates;
  std::vector<std::string> full;
  if (!names.empty()) {
    full.reserve(names.size() + 1);
    full.emplace_back("Intercept");
    full.insert(full.end(), names.begin(), names.end());
  }
  return Dataset(y, std::move(x), std::move(full));
}

LawKind law_from_name(const std::string& name) {
  if (name == "two-point") return LawKind::TwoPoint;
  if (name == "feng") return LawKind::FengContinuous;
  if (name == "g1") return LawKind::SuppG1;
  if (name == "g2") return LawKind::SuppG2;
  if (name == "point-mass") return LawKind::SuppPointMass;
  throw std::invalid_argument("unknown weight law '" + name +
                              "' (choices: two-point, feng, g1, g2, point-mass)");
}

std::vector<MethodSpec> specs_from_names(const std::vector<std::string>& names, double gamma,
                                         const std::string& a_rule) {
  if (names.empty()) throw std::invalid_argument("methods list is empty");
  const ANRule rule = a_rule == "data" ? ANRule::DataDriven : ANRule::RateN13;
  std::vector<MethodSpec> specs;
  for (const auto& token : names) {
    MethodSpec spec;
    if (token == "newal") {
      spec.kind = Method::NewAL;
      spec.gamma = gamma;
    } else if (token == "newl") {
      spec.kind = Method::NewL;
      spec.a_rule = rule;
      spec.source = ThresholdSource::Lasso;  // matches the simulate preset
    } else if (token == "fullwb") {
      spec.kind = Method::FullWB;
    } else if (token == "oraclewb") {
      spec.kind = Method::OracleWB;
    } else if (token == "tswb") {
      spec.kind = Method::TwoStepWB;
      spec.selector = SelectorKind::AdaptiveBIC;
      spec.gamma = gamma;
    } else if (token == "tswb-lasso") {
      spec.kind = Method::TwoStepWB;
      spec.selector = SelectorKind::LassoCV;
    } else {
      throw std::invalid_argument("unknown method '" + token +
                                  "' (choices: newal, newl, fullwb, oraclewb, tswb, tswb-lasso)");
    }
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace

PYBIND11_MODULE(_wildqr, m) {
  m.doc() = "penalized quantile regression with wild-bootstrap inference";

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("beta", &FitResult::beta)
      .def_readonly("residuals", &FitResult::residuals)
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("active_set", &FitResult::active_set)
      .def_readonly("kkt_gap", &FitResult::kkt_gap)
      .def_readonly("iterations", &FitResult::iterations)
      .def("__repr__", [](const FitResult& f) {
        return "FitResult(p+1=" + std::to_string(f.beta.size()) +
               ", active=" + std::to_string(f.active_set.size()) +
               ", iterations=" + std::to_string(f.iterations) + ")";
      });

  py::class_<BootstrapDraws>(m, "BootstrapDraws")
      .def_readonly("center", &BootstrapDraws::center)
      .def_property_readonly("anchor",
                             [](const BootstrapDraws& d) { return d.interval_anchor(); })
      .def_readonly("draws", &BootstrapDraws::draws)
      .def_readonly("n", &BootstrapDraws::n)
      .def_readonly("failures", &BootstrapDraws::failures);

  py::class_<ConfidenceInterval>(m, "ConfidenceInterval")
      .def_readonly("lower", &ConfidenceInterval::lower)
      .def_readonly("upper", &ConfidenceInterval::upper)
      .def_readonly("level", &ConfidenceInterval::level)
      .def_readonly("coefficient", &ConfidenceInterval::coefficient)
      .def("__repr__", [](const ConfidenceInterval& c) {
        return "ConfidenceInterval(" + std::to_string(c.lower) + ", " + std::to_string(c.upper) +
               ")";
      });

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("c1", &ConditionReport::c1)
      .def_readonly("c2", &ConditionReport::c2)
      .def_readonly("pos_integral", &ConditionReport::pos_integral)
      .def_readonly("neg_integral", &ConditionReport::neg_integral)
      .def_readonly("tau_quantile", &ConditionReport::tau_quantile)
      .def_readonly("frac_neg", &ConditionReport::frac_neg)
      .def_readonly("frac_nonpos", &ConditionReport::frac_nonpos)
      .def_readonly("mean_abs", &ConditionReport::mean_abs)
      .def_readonly("pass_support", &ConditionReport::pass_support)
      .def_readonly("pass_integrals", &ConditionReport::pass_integrals)
      .def_readonly("pass_quantile", &ConditionReport::pass_quantile)
      .def_property_readonly("passed", &ConditionReport::pass);

  py::class_<TuneEntry>(m, "TuneEntry")
      .def_readonly("value", &TuneEntry::value)
      .def_readonly("score", &TuneEntry::score)
      .def_readonly("active", &TuneEntry::active)
      .def_readonly("converged", &TuneEntry::converged);

  py::class_<TuneResult>(m, "TuneResult")
      .def_readonly("selected", &TuneResult::selected)
      .def_readonly("table", &TuneResult::table);

  py::class_<MethodReport>(m, "MethodReport")
      .def_readonly("label", &MethodReport::label)
      .def_readonly("coverage", &MethodReport::coverage)
      .def_readonly("avg_length", &MethodReport::avg_length)
      .def_readonly("zeros_coverage", &MethodReport::zeros_coverage)
      .def_readonly("zeros_length", &MethodReport::zeros_length)
      .def_readonly("tp", &MethodReport::tp)
      .def_readonly("fp", &MethodReport::fp)
      .def_readonly("reps_used", &MethodReport::reps_used)
      .def_readonly("failures", &MethodReport::failures);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("n", &SimReport::n)
      .def_readonly("tau", &SimReport::tau)
      .def_readonly("true_beta", &SimReport::true_beta)
      .def_readonly("reps", &SimReport::reps)
      .def_readonly("B", &SimReport::B)
      .def_readonly("alpha", &SimReport::alpha)
      .def_readonly("seed", &SimReport::seed)
      .def_readonly("methods", &SimReport::methods);

  m.def(
      "fit_unpenalized",
      [](const VectorXd& y, const MatrixXd& X, double tau, std::vector<std::string> names) {
        return fit_unpenalized(build_dataset(y, X, std::move(names)), QuantileLevel(tau));
      },
      py::arg("y"), py::arg("X"), py::arg("tau") = 0.5,
      py::arg("names") = std::vector<std::string>{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "fit_lasso",
      [](const VectorXd& y, const MatrixXd& X, double tau, double lam,
         std::vector<std::string> names) {
        return fit_lasso(build_dataset(y, X, std::move(names)), QuantileLevel(tau), lam);
      },
      py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lam"),
      py::arg("names") = std::vector<std::string>{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "fit_adaptive",
      [](const VectorXd& y, const MatrixXd& X, double tau, double lam, double gamma,
         std::vector<std::string> names) {
        return fit_adaptive(build_dataset(y, X, std::move(names)), QuantileLevel(tau), lam, gamma);
      },
      py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lam"), py::arg("gamma") = 1.0,
      py::arg("names") = std::vector<std::string>{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "bootstrap_adaptive",
      [](const VectorXd& y, const MatrixXd& X, double tau, double lam, double gamma, Index B,
         std::uint64_t seed, const std::string& law, const Params& law_params, int threads) {
        const QuantileLevel level(tau);
        const WeightLaw w = make_law(law_from_name(law), level, law_params);
        return bootstrap_adaptive(build_dataset(y, X, {}), level, lam, gamma, w, B, seed, threads);
      },
      py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lam"), py::arg("gamma") = 1.0,
      py::arg("B") = 400, py::arg("seed") = 0, py::arg("law") = "two-point",
      py::arg("law_params") = Params{}, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "bootstrap_lasso",
      [](const VectorXd& y, const MatrixXd& X, double tau, double lam, Index B,
         std::uint64_t seed, std::optional<double> a_n, const std::string& law,
         const Params& law_params, int threads, const std::string& source) {
        const QuantileLevel level(tau);
        const WeightLaw w = make_law(law_from_name(law), level, law_params);
        const ThresholdSequence seq =
            a_n ? ThresholdSequence::fixed(*a_n) : ThresholdSequence::rate_n13(y.size());
        ThresholdSource src;
        if (source == "ordinary")
          src = ThresholdSource::Ordinary;
        else if (source == "lasso")
          src = ThresholdSource::Lasso;
        else
          throw std::invalid_argument("unknown source '" + source +
                                      "' (choices: ordinary, lasso)");
        return bootstrap_lasso(build_dataset(y, X, {}), level, lam, seq, w, B, seed, threads,
                               src);
      },
      py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lam"), py::arg("B") = 400,
      py::arg("seed") = 0, py::arg("a_n") = std::nullopt, py::arg("law") = "two-point",
      py::arg("law_params") = Params{}, py::arg("threads") = 1, py::arg("source") = "ordinary",
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "bootstrap_unpenalized",
      [](const VectorXd& y, const MatrixXd& X, double tau, Index B, std::uint64_t seed,
         const std::string& law, const Params& law_params, int threads) {
        const QuantileLevel level(tau);
        const WeightLaw w = make_law(law_from_name(law), level, law_params);
        return bootstrap_unpenalized(build_dataset(y, X, {}), level, w, B, seed, threads);
      },
      py::arg("y"), py::arg("X"), py::arg("tau") = 0.5, py::arg("B") = 400, py::arg("seed") = 0,
      py::arg("law") = "two-point", py::arg("law_params") = Params{}, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def("percentile_ci", &percentile_ci, py::arg("draws"), py::arg("alpha") = 0.05);

  m.def(
      "bic_select",
      [](const VectorXd& y, const MatrixXd& X, double tau, double gamma,
         std::optional<std::vector<double>> grid) {
        const Dataset data = build_dataset(y, X, {});
        const LambdaGrid g = grid ? LambdaGrid(*grid) : default_grid(data.n(), data.p());
        return bic_select(data, QuantileLevel(tau), gamma, g);
      },
      py::arg("y"), py::arg("X"), py::arg("tau") = 0.5, py::arg("gamma") = 1.0,
      py::arg("grid") = std::nullopt, py::call_guard<py::gil_scoped_release>());

  m.def(
      "cv_select",
      [](const VectorXd& y, const MatrixXd& X, double tau, std::optional<std::vector<double>> grid,
         int folds, std::uint64_t seed) {
        const Dataset data = build_dataset(y, X, {});
        const LambdaGrid g = grid ? LambdaGrid(*grid) : default_grid(data.n(), data.p());
        return cv_select(data, QuantileLevel(tau), g, folds, seed);
      },
      py::arg("y"), py::arg("X"), py::arg("tau") = 0.5, py::arg("grid") = std::nullopt,
      py::arg("folds") = 5, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "select_a_n",
      [](const VectorXd& y, const MatrixXd& X, double tau, double lam,
         std::optional<std::vector<double>> candidates, const std::string& law, Index B_small,
         std::uint64_t seed) {
        const Dataset data = build_dataset(y, X, {});
        const QuantileLevel level(tau);
        const std::vector<double> cand =
            candidates ? *candidates : default_a_candidates(data.n());
        const WeightLaw w = make_law(law_from_name(law), level);
        return select_a_n(data, level, lam, cand, w, B_small, seed);
      },
      py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lam"),
      py::arg("candidates") = std::nullopt, py::arg("law") = "two-point",
      py::arg("B_small") = 100, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "verify_law",
      [](const std::string& law, double tau, const Params& params, Index mc, double tol,
         std::uint64_t seed) {
        return verify_conditions(make_law(law_from_name(law), QuantileLevel(tau), params), mc, tol,
                                 seed);
      },
      py::arg("law"), py::arg("tau") = 0.5, py::arg("params") = Params{},
      py::arg("mc") = 100000, py::arg("tol") = 0.02, py::arg("seed") = 0x77eed5u,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "sample_law",
      [](const std::string& law, double tau, const Params& params, Index n, std::uint64_t seed) {
        Rng rng(seed);
        return sample(make_law(law_from_name(law), QuantileLevel(tau), params), n, rng);
      },
      py::arg("law"), py::arg("tau"), py::arg("params") = Params{}, py::arg("n") = 1,
      py::arg("seed") = 0);

  m.def(
      "run_study",
      [](Index n, double tau, const std::vector<std::string>& methods, Index reps, Index B,
         double alpha, std::uint64_t seed, int threads, int cv_folds, double gamma,
         const std::string& a_rule, const std::string& law) {
        StudyConfig cfg{PaperDesign(n, QuantileLevel(tau)),
                        specs_from_names(methods, gamma, a_rule),
                        reps,
                        B,
                        alpha,
                        seed,
                        threads,
                        cv_folds,
                        100,
                        law_from_name(law),
                        {}};
        return run_study(cfg);
      },
      py::arg("n"), py::arg("tau") = 0.5, py::arg("methods") = std::vector<std::string>{"newal"},
      py::arg("reps") = 400, py::arg("B") = 300, py::arg("alpha") = 0.05, py::arg("seed") = 0,
      py::arg("threads") = 1, py::arg("cv_folds") = 5, py::arg("gamma") = 1.0,
      py::arg("a_rule") = "n13", py::arg("law") = "two-point",
      py::call_guard<py::gil_scoped_release>());

  m.def("normal_quantile", &normal_quantile, py::arg("p"));
  m.def("method_label",
        [](const std::string& name, double gamma, const std::string& a_rule) {
          return method_label(specs_from_names({name}, gamma, a_rule).front());
        },
        py::arg("name"), py::arg("gamma") = 1.0, py::arg("a_rule") = "n13");

  m.attr("__version__") = "0.1.0";
}
