#pragma once

#include <vector>

#include "wildqr/solver.hpp"
#include "wildqr/types.hpp"

namespace wildqr {

// Adaptive-lasso weights w_j = |pilot_j|^(-gamma). Slopes whose pilot is
// below the zero cutoff carry infinite weight; they are listed in `excluded`
// (beta indices, 1..p) and their w entry is +inf.
struct AdaptiveWeights {
  VectorXd w;                    // length p, slot j-1 belongs to slope j
  std::vector<Index> excluded;   // slopes fixed at zero in the adaptive fit
};

AdaptiveWeights adaptive_weights(const VectorXd& pilot, double gamma,
                                 double zero_cutoff = 1e-8);

enum class ThresholdRule { Fixed, RateN13, DataDriven };

struct ThresholdSequence {
  double a_n = 0.0;
  ThresholdRule rule = ThresholdRule::Fixed;

  static ThresholdSequence fixed(double value);
  static ThresholdSequence rate_n13(Index n);                 // a_n = n^(-1/3)
  static ThresholdSequence data_driven(double chosen_value);  // from select_a_n
};

enum class ThresholdSource { Ordinary, Lasso };

// Modified-bootstrap center: intercept is always the ordinary-QR intercept,
// slope j keeps source_j when |source_j| > a_n (strict) and is zero
// otherwise.
VectorXd threshold_center(const VectorXd& pilot_unpenalized, const VectorXd& lasso_fit,
                          const ThresholdSequence& a_n, ThresholdSource source);

// Estimator pipelines built on the LP solver.
FitResult fit_unpenalized(const Dataset& data, const QuantileLevel& tau,
                          const SolverOptions& opts = {});
FitResult fit_lasso(const Dataset& data, const QuantileLevel& tau, double lambda,
                    const SolverOptions& opts = {});

// Adaptive L1 with the pilot supplied (the bootstrap recomputes pilots per
// replicate). Excluded coordinates are removed from the design and restored
// as exact zeros. A coordinate is also removed when lambda * w_j exceeds the
// check-loss Lipschitz constant max(tau,1-tau) * sum_i |x_ij|, which forces
// beta_j = 0 in every optimum; dropping it is exact and keeps the LP
// well-conditioned when gamma amplifies a small pilot.
FitResult fit_adaptive_with_pilot(const Dataset& data, const QuantileLevel& tau, double lambda,
                                  double gamma, const VectorXd& pilot,
                                  const SolverOptions& opts = {});

// Convenience wrapper computing the unpenalized pilot on `data` first.
FitResult fit_adaptive(const Dataset& data, const QuantileLevel& tau, double lambda, double gamma,
                       const SolverOptions& opts = {});

}  // namespace wildqr
