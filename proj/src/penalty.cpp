#include "wildqr/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wildqr {

AdaptiveWeights adaptive_weights(const VectorXd& pilot, double gamma, double zero_cutoff) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("adaptive_weights: gamma must be finite and > 0");
  if (pilot.size() < 1) throw std::invalid_argument("adaptive_weights: empty pilot");
  const Index p = pilot.size() - 1;
  AdaptiveWeights out;
  out.w = VectorXd::Zero(p);
  for (Index j = 1; j <= p; ++j) {
    const double mag = std::abs(pilot[j]);
    if (mag < zero_cutoff) {
      out.w[j - 1] = std::numeric_limits<double>::infinity();
      out.excluded.push_back(j);
    } else {
      out.w[j - 1] = std::pow(mag, -gamma);
    }
  }
  return out;
}

ThresholdSequence ThresholdSequence::fixed(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("threshold: a_n must be finite and > 0");
  return {value, ThresholdRule::Fixed};
}

ThresholdSequence ThresholdSequence::rate_n13(Index n) {
  if (n < 1) throw std::invalid_argument("threshold: n must be positive");
  return {std::pow(static_cast<double>(n), -1.0 / 3.0), ThresholdRule::RateN13};
}

ThresholdSequence ThresholdSequence::data_driven(double chosen_value) {
  if (!(chosen_value > 0.0) || !std::isfinite(chosen_value))
    throw std::invalid_argument("threshold: a_n must be finite and > 0");
  return {chosen_value, ThresholdRule::DataDriven};
}

VectorXd threshold_center(const VectorXd& pilot_unpenalized, const VectorXd& lasso_fit,
                          const ThresholdSequence& a_n, ThresholdSource source) {
  if (pilot_unpenalized.size() != lasso_fit.size())
    throw std::invalid_argument("threshold_center: vector lengths differ");
  if (pilot_unpenalized.size() < 1) throw std::invalid_argument("threshold_center: empty input");
  const VectorXd& src = source == ThresholdSource::Ordinary ? pilot_unpenalized : lasso_fit;
  VectorXd out = VectorXd::Zero(src.size());
  out[0] = pilot_unpenalized[0];
  for (Index j = 1; j < src.size(); ++j)
    out[j] = std::abs(src[j]) > a_n.a_n ? src[j] : 0.0;
  return out;
}

FitResult fit_unpenalized(const Dataset& data, const QuantileLevel& tau,
                          const SolverOptions& opts) {
  return fit(data, tau, PenaltySpec::none(), opts);
}

FitResult fit_lasso(const Dataset& data, const QuantileLevel& tau, double lambda,
                    const SolverOptions& opts) {
  return fit(data, tau, PenaltySpec::lasso(lambda), opts);
}

FitResult fit_adaptive_with_pilot(const Dataset& data, const QuantileLevel& tau, double lambda,
                                  double gamma, const VectorXd& pilot,
                                  const SolverOptions& opts) {
  const Index p = data.p();
  if (pilot.size() != p + 1)
    throw std::invalid_argument("fit_adaptive: pilot length does not match data");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("fit_adaptive: lambda must be finite and >= 0");

  AdaptiveWeights aw = adaptive_weights(pilot, gamma, opts.zero_cutoff);

  const double tmax = std::max(tau.value(), 1.0 - tau.value());
  std::vector<Index> kept;
  for (Index j = 1; j <= p; ++j) {
    if (!std::isfinite(aw.w[j - 1])) continue;
    const double lipschitz = tmax * data.x.col(j).cwiseAbs().sum();
    if (lambda * aw.w[j - 1] > lipschitz && lambda > 0.0) continue;  // exactly zero in any optimum
    kept.push_back(j);
  }

  const auto q = static_cast<Index>(kept.size());
  MatrixXd xr(data.n(), q + 1);
  xr.col(0).setOnes();
  VectorXd wr(q);
  std::vector<std::string> names;
  names.push_back(data.names[0]);
  for (Index k = 0; k < q; ++k) {
    const Index j = kept[static_cast<std::size_t>(k)];
    xr.col(k + 1) = data.x.col(j);
    wr[k] = aw.w[j - 1];
    names.push_back(data.names[static_cast<std::size_t>(j)]);
  }
  Dataset reduced(data.y, std::move(xr), std::move(names));
  const PenaltySpec pen = lambda > 0.0 && q > 0 ? PenaltySpec::adaptive(lambda, gamma, wr)
                                                : PenaltySpec::none();
  FitResult rfit = fit(reduced, tau, pen, opts);

  FitResult out;
  out.beta = VectorXd::Zero(p + 1);
  out.beta[0] = rfit.beta[0];
  for (Index k = 0; k < q; ++k) out.beta[kept[static_cast<std::size_t>(k)]] = rfit.beta[k + 1];
  out.residuals = rfit.residuals;
  out.objective = rfit.objective;
  for (Index j = 1; j <= p; ++j)
    if (out.beta[j] != 0.0) out.active_set.push_back(j);
  out.kkt_gap = rfit.kkt_gap;
  out.iterations = rfit.iterations;
  return out;
}

FitResult fit_adaptive(const Dataset& data, const QuantileLevel& tau, double lambda, double gamma,
                       const SolverOptions& opts) {
  const FitResult pilot = fit_unpenalized(data, tau, opts);
  return fit_adaptive_with_pilot(data, tau, lambda, gamma, pilot.beta, opts);
}

}  // namespace wildqr
