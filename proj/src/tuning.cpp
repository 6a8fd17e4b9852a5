#include "wildqr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wildqr/rng.hpp"
#include "wildqr/solver.hpp"

namespace wildqr {

LambdaGrid::LambdaGrid(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw std::invalid_argument("LambdaGrid: empty grid");
  double prev = 0.0;
  for (double x : values) {
    if (!(x > prev) || !std::isfinite(x))
      throw std::invalid_argument("LambdaGrid: values must be positive and strictly increasing");
    prev = x;
  }
}

LambdaGrid LambdaGrid::log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_spaced: need 0 < lo < hi");
  if (count < 5) throw std::invalid_argument("log_spaced: need at least 5 points");
  std::vector<double> v(static_cast<std::size_t>(count));
  const double ratio = hi / lo;
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] = lo * std::pow(ratio, static_cast<double>(i) / (count - 1));
  v.front() = lo;
  v.back() = hi;
  return LambdaGrid(std::move(v));
}

LambdaGrid default_grid(Index n, Index p) {
  if (p < 2) throw std::invalid_argument("default_grid: needs p >= 2");
  const double ref = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(p)));
  return LambdaGrid::log_spaced(0.01 * ref, 10.0 * ref, 30);
}

std::vector<double> default_a_candidates(Index n) {
  const double base = std::pow(static_cast<double>(n), -1.0 / 3.0);
  return {0.25 * base, 0.5 * base, 1.0 * base, 2.0 * base, 4.0 * base};
}

namespace {

// scan for the smallest score, ties to the larger candidate; entries are
// visited in the order given, which is ascending for grids
TuneResult pick(std::vector<TuneEntry> table, const char* what) {
  TuneResult out;
  out.table = std::move(table);
  bool found = false;
  double best = 0.0, best_value = 0.0;
  for (const auto& e : out.table) {
    if (!e.converged) continue;
    if (!found || e.score < best || (e.score == best && e.value > best_value)) {
      found = true;
      best = e.score;
      best_value = e.value;
    }
  }
  if (!found) throw std::runtime_error(std::string(what) + ": all fits failed");
  out.selected = best_value;
  return out;
}

}  // namespace

TuneResult bic_select(const Dataset& data, const QuantileLevel& tau, double gamma,
                      const LambdaGrid& grid, const SolverOptions& opts) {
  const FitResult pilot = fit_unpenalized(data, tau, opts);
  const double n = static_cast<double>(data.n());
  std::vector<TuneEntry> table;
  table.reserve(grid.values.size());
  for (double lambda : grid.values) {
    TuneEntry e;
    e.value = lambda;
    try {
      const FitResult fit = fit_adaptive_with_pilot(data, tau, lambda, gamma, pilot.beta, opts);
      e.active = static_cast<Index>(fit.active_set.size());
      e.score = std::log(check_loss(fit.residuals, tau)) +
                static_cast<double>(e.active) * std::log(n) / (2.0 * n);
      e.converged = true;
    } catch (const SolverError&) {
    }
    table.push_back(e);
  }
  return pick(std::move(table), "bic_select");
}

std::vector<Index> make_folds(Index n, int K, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("make_folds: K must be at least 2");
  if (n < 2 * static_cast<Index>(K)) throw std::invalid_argument("make_folds: need n >= 2K");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> folds(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    folds[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i % K;
  return folds;
}

TuneResult cv_select_with_folds(const Dataset& data, const QuantileLevel& tau,
                                const LambdaGrid& grid, const std::vector<Index>& folds,
                                const SolverOptions& opts) {
  const Index n = data.n();
  if (static_cast<Index>(folds.size()) != n)
    throw std::invalid_argument("cv_select: fold labels must cover every row");
  Index K = 0;
  for (Index f : folds) {
    if (f < 0) throw std::invalid_argument("cv_select: negative fold label");
    K = std::max(K, f + 1);
  }
  if (K < 2) throw std::invalid_argument("cv_select: need at least 2 folds");

  std::vector<Index> fold_size(static_cast<std::size_t>(K), 0);
  for (Index f : folds) ++fold_size[static_cast<std::size_t>(f)];
  for (Index k = 0; k < K; ++k) {
    const Index train = n - fold_size[static_cast<std::size_t>(k)];
    if (train < data.p() + 2)
      throw std::invalid_argument("cv_select: fold " + std::to_string(k) +
                                  " leaves too few rows to fit");
  }

  const std::size_t L = grid.values.size();
  std::vector<double> total(L, 0.0);
  std::vector<bool> ok(L, true);
  for (Index k = 0; k < K; ++k) {
    std::vector<Index> train_rows;
    train_rows.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
      if (folds[static_cast<std::size_t>(i)] != k) train_rows.push_back(i);
    const auto m = static_cast<Index>(train_rows.size());
    VectorXd ytr(m);
    MatrixXd xtr(m, data.p() + 1);
    for (Index r = 0; r < m; ++r) {
      ytr[r] = data.y[train_rows[static_cast<std::size_t>(r)]];
      xtr.row(r) = data.x.row(train_rows[static_cast<std::size_t>(r)]);
    }
    Dataset train(std::move(ytr), std::move(xtr), data.names);
    for (std::size_t l = 0; l < L; ++l) {
      if (!ok[l]) continue;
      try {
        const FitResult fit = fit_lasso(train, tau, grid.values[l], opts);
        for (Index i = 0; i < n; ++i)
          if (folds[static_cast<std::size_t>(i)] == k)
            total[l] += check_loss(data.y[i] - data.x.row(i).dot(fit.beta), tau);
      } catch (const SolverError&) {
        ok[l] = false;
      }
    }
  }

  std::vector<TuneEntry> table(L);
  for (std::size_t l = 0; l < L; ++l) {
    table[l].value = grid.values[l];
    table[l].converged = ok[l];
    if (ok[l]) table[l].score = total[l] / static_cast<double>(n);
  }
  return pick(std::move(table), "cv_select");
}

TuneResult cv_select(const Dataset& data, const QuantileLevel& tau, const LambdaGrid& grid, int K,
                     std::uint64_t seed, const SolverOptions& opts) {
  return cv_select_with_folds(data, tau, grid, make_folds(data.n(), K, seed), opts);
}

TuneResult select_a_n(const Dataset& data, const QuantileLevel& tau, double lambda,
                      const std::vector<double>& candidates, const WeightLaw& law, Index B_small,
                      std::uint64_t seed, ThresholdSource source, const SolverOptions& opts) {
  if (candidates.empty()) throw std::invalid_argument("select_a_n: no candidates");
  for (double a : candidates)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("select_a_n: candidates must be positive");
  std::vector<TuneEntry> table;
  table.reserve(candidates.size());
  for (double a : candidates) {
    // same seed across candidates: common weight streams sharpen the
    // comparison and keep the choice deterministic
    const BootstrapDraws draws = bootstrap_lasso(data, tau, lambda, ThresholdSequence::fixed(a),
                                                 law, B_small, seed, 1, source, opts);
    double mse = 0.0;
    for (Index b = 0; b < draws.draws.rows(); ++b)
      mse += (draws.draws.row(b).transpose() - draws.center).squaredNorm();
    mse /= static_cast<double>(draws.draws.rows());
    TuneEntry e;
    e.value = a;
    e.score = mse;
    e.converged = true;
    table.push_back(e);
  }
  return pick(std::move(table), "select_a_n");
}

}  // namespace wildqr
