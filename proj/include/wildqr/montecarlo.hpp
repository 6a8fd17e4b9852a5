#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wildqr/bootstrap.hpp"
#include "wildqr/tuning.hpp"
#include "wildqr/types.hpp"
#include "wildqr/weight_laws.hpp"

namespace wildqr {

// The simulation design: ten covariates, X1 = Phi(Z1) uniform and driving the
// error scale, slopes 0.25/0.5/1/2 on X3/X5/X7/X9, and slope Phi^-1(tau) on X1
// induced by the heteroscedastic error.
struct PaperDesign {
  Index n;
  QuantileLevel tau;
  PaperDesign(Index n_in, QuantileLevel tau_in);
  VectorXd true_beta() const;  // length 11, intercept first
  static constexpr Index kSlopes = 10;
};

// Y = 0.25 X3 + 0.5 X5 + X7 + 2 X9 + X1 xi; the tau-th conditional quantile
// is x' true_beta because X1 (xi - Phi^-1(tau)) has conditional tau-quantile 0
Dataset generate(const PaperDesign& design, std::uint64_t seed);

struct OracleCovariance {
  MatrixXd d0, d1, sandwich;
  std::vector<Index> coords;  // full-design indices of the active block
};

// tau(1-tau) D1^-1 D0 D1^-1, symmetrized
MatrixXd sandwich_cov(const QuantileLevel& tau, const MatrixXd& d0, const MatrixXd& d1);

// Monte Carlo moments of the active block over the covariate law with the
// design's known f_i(0) = phi(Phi^-1(tau))/x_i1. Note E[1/X1] diverges, so d1
// is a finite-sample regularization that grows slowly with n_mc; the sandwich
// is a diagnostic, not a limit.
OracleCovariance oracle_cov(const PaperDesign& design, Index n_mc, std::uint64_t seed);

enum class Method { NewAL, NewL, FullWB, OracleWB, TwoStepWB };
enum class ANRule { RateN13, DataDriven };
enum class SelectorKind { AdaptiveBIC, LassoCV };

struct MethodSpec {
  Method kind = Method::NewAL;
  double gamma = 1.0;                             // NewAL / adaptive selector
  ANRule a_rule = ANRule::RateN13;                // NewL
  ThresholdSource source = ThresholdSource::Ordinary;  // NewL recentering
  SelectorKind selector = SelectorKind::AdaptiveBIC;  // TwoStepWB
  std::optional<double> lambda;                   // fixed penalty, skips tuning
  std::string label;                              // defaulted when empty
};

std::string method_label(const MethodSpec& spec);

struct StudyConfig {
  PaperDesign design;
  std::vector<MethodSpec> methods;
  Index reps = 400;
  Index B = 300;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
  int cv_folds = 5;
  Index b_small = 100;  // bootstrap size inside the data-driven a_n rule
  LawKind law = LawKind::TwoPoint;
  SolverOptions solver;
};

struct MethodReport {
  std::string label;
  VectorXd coverage;    // per coefficient, fraction of usable reps
  VectorXd avg_length;  // per coefficient
  double zeros_coverage = 0.0;  // averaged over true-zero slopes
  double zeros_length = 0.0;
  double tp = 0.0;  // average true/false positives from the point estimate
  double fp = 0.0;
  Index reps_used = 0;
  Index failures = 0;
};

struct SimReport {
  Index n = 0;
  double tau = 0.0;
  VectorXd true_beta;
  Index reps = 0;
  Index B = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<MethodReport> methods;
};

namespace detail {

struct MethodOutcome {
  VectorXd center;  // full length-11 vector, exact zeros where not selected
  std::vector<ConfidenceInterval> cis;
};

MethodOutcome run_method(const MethodSpec& spec, const Dataset& data, const QuantileLevel& tau,
                         const VectorXd& true_beta, Index B, double alpha, LawKind law_kind,
                         std::uint64_t boot_seed, std::uint64_t tune_seed, int cv_folds,
                         Index b_small, const SolverOptions& opts);

}  // namespace detail

// One row of Table-1-style metrics per method; aborts if any method fails on
// more than 1% of replications.
SimReport run_study(const StudyConfig& config);

}  // namespace wildqr
