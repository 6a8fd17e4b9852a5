#pragma once

#include <functional>
#include <vector>

#include "wildqr/penalty.hpp"
#include "wildqr/types.hpp"
#include "wildqr/weight_laws.hpp"

namespace wildqr {

enum class BootstrapMethod { AdaptiveL1, ModifiedL1, Unpenalized };

struct BootstrapDraws {
  VectorXd center;  // p+1, the value the draws are centered on
  // anchor of the percentile intervals; empty means the center. The modified
  // L1 bootstrap separates them: draws recenter on the thresholded vector,
  // but they approximate the law of the lasso estimator, so the intervals
  // anchor on the lasso fit of the original data.
  VectorXd anchor;
  MatrixXd draws;  // one row per converged replicate, in replicate order
  Index n = 0;     // original sample size (for the sqrt(n) scaling)
  BootstrapMethod method = BootstrapMethod::Unpenalized;
  Index failures = 0;

  const VectorXd& interval_anchor() const { return anchor.size() ? anchor : center; }
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  Index coefficient = 0;
};

// epsilon*_i = r_i * |residual_i|
VectorXd wild_residuals(const VectorXd& residuals, const VectorXd& r);

namespace detail {

// r vector for replicate b; the default draws from a WeightLaw on the stream
// derived from (seed, b)
using WeightSource = std::function<VectorXd(Index replicate, Index n)>;
// refits the chosen estimator on the pseudo-data; throws on failure
using Refitter = std::function<VectorXd(const Dataset& pseudo)>;

// Shared wild-bootstrap engine: Y*_i = x_i' center + r_i |eps_i| per
// replicate, refit, collect rows in replicate order. Failed replicates are
// dropped and counted; more than 1% failing aborts the run.
BootstrapDraws wild_engine(const Dataset& data, const VectorXd& center, BootstrapMethod method,
                           Index B, const WeightSource& weights, const Refitter& refit,
                           int threads);

}  // namespace detail

// Section 2.2 bootstrap for the adaptive-L1 estimator: the pilot and the
// adaptive weights are recomputed inside every replicate; lambda and gamma
// stay fixed.
BootstrapDraws bootstrap_adaptive(const Dataset& data, const QuantileLevel& tau, double lambda,
                                  double gamma, const WeightLaw& law, Index B, std::uint64_t seed,
                                  int threads = 1, const SolverOptions& opts = {});

// Section 3 modified bootstrap for the L1 estimator: residuals and pseudo-data
// are built from the thresholded center; replicates refit the plain lasso at
// the same lambda.
BootstrapDraws bootstrap_lasso(const Dataset& data, const QuantileLevel& tau, double lambda,
                               const ThresholdSequence& a_n, const WeightLaw& law, Index B,
                               std::uint64_t seed, int threads = 1,
                               ThresholdSource source = ThresholdSource::Ordinary,
                               const SolverOptions& opts = {});

// Wild bootstrap of the unpenalized estimator (full/oracle/two-step
// comparators).
BootstrapDraws bootstrap_unpenalized(const Dataset& data, const QuantileLevel& tau,
                                     const WeightLaw& law, Index B, std::uint64_t seed,
                                     int threads = 1, const SolverOptions& opts = {});

// Percentile intervals from centered draws: with d_b = sqrt(n)(draw_b -
// center), the interval is [center - d^(1-a/2)/sqrt(n), center -
// d^(a/2)/sqrt(n)] using the type-1 quantile Q(q) = k-th smallest, k =
// ceil(m q).
std::vector<ConfidenceInterval> percentile_ci(const BootstrapDraws& draws, double alpha);

// type-1 empirical quantile of a sample
double empirical_quantile(std::vector<double> values, double q);

}  // namespace wildqr
