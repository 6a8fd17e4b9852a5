#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "wildqr/bootstrap.hpp"
#include "wildqr/penalty.hpp"
#include "wildqr/types.hpp"

namespace wildqr {

// Grid of penalty levels. Explicit grids only need one positive ascending
// value; generated grids (log_spaced, default_grid) require at least five.
struct LambdaGrid {
  std::vector<double> values;
  explicit LambdaGrid(std::vector<double> v);
  static LambdaGrid log_spaced(double lo, double hi, int count);
};

// 30 log-spaced values on [0.01, 10] * sqrt(n log p); needs p >= 2
LambdaGrid default_grid(Index n, Index p);

// {0.25, 0.5, 1, 2, 4} * n^(-1/3)
std::vector<double> default_a_candidates(Index n);

struct TuneEntry {
  double value = 0.0;  // the candidate (lambda or a_n)
  double score = std::numeric_limits<double>::quiet_NaN();
  Index active = -1;  // nonzero slopes of the fit; -1 when not tracked
  bool converged = false;
};

struct TuneResult {
  double selected = 0.0;
  std::vector<TuneEntry> table;
};

// BIC(lambda) = log(sum check loss) + |active| log(n) / (2n) over adaptive-L1
// fits sharing one unpenalized pilot; ties go to the larger lambda.
TuneResult bic_select(const Dataset& data, const QuantileLevel& tau, double gamma,
                      const LambdaGrid& grid, const SolverOptions& opts = {});

// Seeded shuffle, round-robin assignment: n fold labels in [0, K)
std::vector<Index> make_folds(Index n, int K, std::uint64_t seed);

// K-fold CV for the lasso fit: score is the mean held-out check loss; ties go
// to the larger lambda.
TuneResult cv_select(const Dataset& data, const QuantileLevel& tau, const LambdaGrid& grid, int K,
                     std::uint64_t seed, const SolverOptions& opts = {});
TuneResult cv_select_with_folds(const Dataset& data, const QuantileLevel& tau,
                                const LambdaGrid& grid, const std::vector<Index>& folds,
                                const SolverOptions& opts = {});

// Picks the threshold a_n minimizing the bootstrap MSE mean_b ||draw_b -
// center||^2 with B_small replicates per candidate (common weight streams);
// ties go to the larger candidate. Bootstrap failures propagate.
TuneResult select_a_n(const Dataset& data, const QuantileLevel& tau, double lambda,
                      const std::vector<double>& candidates, const WeightLaw& law, Index B_small,
                      std::uint64_t seed, ThresholdSource source = ThresholdSource::Ordinary,
                      const SolverOptions& opts = {});

}  // namespace wildqr
