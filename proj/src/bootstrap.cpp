#include "wildqr/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "wildqr/parallel.hpp"
#include "wildqr/rng.hpp"

namespace wildqr {

VectorXd wild_residuals(const VectorXd& residuals, const VectorXd& r) {
  if (residuals.size() != r.size())
    throw std::invalid_argument("wild_residuals: length mismatch");
  return r.array() * residuals.array().abs();
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(m * q)));
  if (k > values.size()) k = values.size();
  return values[k - 1];
}

namespace detail {

BootstrapDraws wild_engine(const Dataset& data, const VectorXd& center, BootstrapMethod method,
                           Index B, const WeightSource& weights, const Refitter& refit,
                           int threads) {
  const Index n = data.n();
  if (center.size() != data.p() + 1)
    throw std::invalid_argument("bootstrap: center length does not match data");
  const VectorXd fitted = data.x * center;
  const VectorXd eps_abs = (data.y - fitted).cwiseAbs();

  std::vector<std::optional<VectorXd>> rows(static_cast<std::size_t>(B));
  parallel_for(B, threads, [&](Index b) {
    const VectorXd r = weights(b, n);
    VectorXd ystar = fitted.array() + r.array() * eps_abs.array();
    try {
      Dataset pseudo(std::move(ystar), data.x, data.names);
      rows[static_cast<std::size_t>(b)] = refit(pseudo);
    } catch (const std::exception&) {
      // dropped and counted below
    }
  });

  Index failures = 0;
  for (const auto& row : rows)
    if (!row) ++failures;
  if (static_cast<double>(failures) > 0.01 * static_cast<double>(B))
    throw std::runtime_error("bootstrap: " + std::to_string(failures) + " of " +
                             std::to_string(B) + " replicates failed to converge");

  BootstrapDraws out;
  out.center = center;
  out.n = n;
  out.method = method;
  out.failures = failures;
  out.draws.resize(B - failures, data.p() + 1);
  Index k = 0;
  for (const auto& row : rows)
    if (row) out.draws.row(k++) = row->transpose();
  return out;
}

}  // namespace detail

namespace {

detail::WeightSource law_source(const WeightLaw& law, std::uint64_t seed) {
  return [law, seed](Index b, Index n) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(b)));
    return sample(law, n, rng);
  };
}

void check_b(Index B) {
  if (B < 100) throw std::invalid_argument("bootstrap: B must be at least 100");
}

}  // namespace

BootstrapDraws bootstrap_adaptive(const Dataset& data, const QuantileLevel& tau, double lambda,
                                  double gamma, const WeightLaw& law, Index B, std::uint64_t seed,
                                  int threads, const SolverOptions& opts) {
  check_b(B);
  const FitResult center = fit_adaptive(data, tau, lambda, gamma, opts);
  auto refit = [&, lambda, gamma](const Dataset& pseudo) {
    const FitResult pilot = fit_unpenalized(pseudo, tau, opts);
    return fit_adaptive_with_pilot(pseudo, tau, lambda, gamma, pilot.beta, opts).beta;
  };
  return detail::wild_engine(data, center.beta, BootstrapMethod::AdaptiveL1, B,
                             law_source(law, seed), refit, threads);
}

BootstrapDraws bootstrap_lasso(const Dataset& data, const QuantileLevel& tau, double lambda,
                               const ThresholdSequence& a_n, const WeightLaw& law, Index B,
                               std::uint64_t seed, int threads, ThresholdSource source,
                               const SolverOptions& opts) {
  check_b(B);
  const FitResult ordinary = fit_unpenalized(data, tau, opts);
  const FitResult lasso = fit_lasso(data, tau, lambda, opts);
  const VectorXd center = threshold_center(ordinary.beta, lasso.beta, a_n, source);
  auto refit = [&, lambda](const Dataset& pseudo) {
    return fit_lasso(pseudo, tau, lambda, opts).beta;
  };
  BootstrapDraws out = detail::wild_engine(data, center, BootstrapMethod::ModifiedL1, B,
                                           law_source(law, seed), refit, threads);
  out.anchor = lasso.beta;
  return out;
}

BootstrapDraws bootstrap_unpenalized(const Dataset& data, const QuantileLevel& tau,
                                     const WeightLaw& law, Index B, std::uint64_t seed,
                                     int threads, const SolverOptions& opts) {
  check_b(B);
  const FitResult center = fit_unpenalized(data, tau, opts);
  auto refit = [&](const Dataset& pseudo) { return fit_unpenalized(pseudo, tau, opts).beta; };
  return detail::wild_engine(data, center.beta, BootstrapMethod::Unpenalized, B,
                             law_source(law, seed), refit, threads);
}

std::vector<ConfidenceInterval> percentile_ci(const BootstrapDraws& draws, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("percentile_ci: alpha must lie in (0,1)");
  if (draws.draws.rows() < 1) throw std::invalid_argument("percentile_ci: no draws");
  if (draws.anchor.size() && draws.anchor.size() != draws.center.size())
    throw std::invalid_argument("percentile_ci: anchor length mismatch");
  const double root_n = std::sqrt(static_cast<double>(draws.n));
  const VectorXd& anchor = draws.interval_anchor();
  std::vector<ConfidenceInterval> out;
  out.reserve(static_cast<std::size_t>(draws.center.size()));
  for (Index j = 0; j < draws.center.size(); ++j) {
    std::vector<double> d(static_cast<std::size_t>(draws.draws.rows()));
    for (Index b = 0; b < draws.draws.rows(); ++b)
      d[static_cast<std::size_t>(b)] = root_n * (draws.draws(b, j) - draws.center[j]);
    const double d_hi = empirical_quantile(d, 1.0 - alpha / 2.0);
    const double d_lo = empirical_quantile(d, alpha / 2.0);
    ConfidenceInterval ci;
    ci.lower = anchor[j] - d_hi / root_n;
    ci.upper = anchor[j] - d_lo / root_n;
    ci.level = 1.0 - alpha;
    ci.coefficient = j;
    out.push_back(ci);
  }
  return out;
}

}  // namespace wildqr
