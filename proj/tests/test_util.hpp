#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wildqr/rng.hpp"
#include "wildqr/solver.hpp"
#include "wildqr/types.hpp"

namespace testutil {

using namespace wildqr;

inline Dataset make_dataset(const std::vector<double>& y,
                            const std::vector<std::vector<double>>& cols) {
  const auto n = static_cast<Index>(y.size());
  MatrixXd x(n, static_cast<Index>(cols.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (Index i = 0; i < n; ++i) x(i, static_cast<Index>(j) + 1) = cols[j][static_cast<std::size_t>(i)];
  VectorXd yv(n);
  for (Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];
  return Dataset(std::move(yv), std::move(x));
}

// type-1 empirical quantile: k-th smallest with k = ceil(m q), clamped to [1, m]
inline double quantile_type1(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  auto m = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(m * q)));
  if (k > v.size()) k = v.size();
  return v[k - 1];
}

// Multi-stage lattice refinement around successive grid minima. Returns the
// final-stage result; *eval_min tracks the best objective seen at any stage
// so callers can assert solver dominance over every evaluated point.
inline FitResult multi_stage_grid(const Dataset& data, const QuantileLevel& tau,
                                  const PenaltySpec& penalty, double box_lo, double box_hi,
                                  const std::vector<double>& steps, double* eval_min = nullptr) {
  GridSpec grid;
  grid.lo = VectorXd::Constant(data.p() + 1, box_lo);
  grid.hi = VectorXd::Constant(data.p() + 1, box_hi);
  grid.step = steps.front();
  FitResult best = brute_force_fit(data, tau, penalty, grid);
  double seen = best.objective;
  for (std::size_t s = 1; s < steps.size(); ++s) {
    const double margin = 3.0 * steps[s - 1];
    grid.lo = best.beta.array() - margin;
    grid.hi = best.beta.array() + margin;
    grid.step = steps[s];
    best = brute_force_fit(data, tau, penalty, grid);
    seen = std::min(seen, best.objective);
  }
  if (eval_min) *eval_min = seen;
  return best;
}

}  // namespace testutil
