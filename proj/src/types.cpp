#include "wildqr/types.hpp"

#include <cmath>

namespace wildqr {

QuantileLevel::QuantileLevel(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("tau must lie strictly in (0,1), got " + std::to_string(tau));
}

Dataset::Dataset(VectorXd y_in, MatrixXd x_in, std::vector<std::string> names_in)
    : y(std::move(y_in)), x(std::move(x_in)), names(std::move(names_in)) {
  if (x.rows() != y.size())
    throw std::invalid_argument("dataset: x has " + std::to_string(x.rows()) +
                                " rows but y has " + std::to_string(y.size()));
  if (x.cols() < 1) throw std::invalid_argument("dataset: x needs an intercept column");
  if (!y.allFinite() || !x.allFinite())
    throw std::invalid_argument("dataset: non-finite values in y or x");
  for (Index i = 0; i < x.rows(); ++i)
    if (x(i, 0) != 1.0)
      throw std::invalid_argument("dataset: column 0 must be all ones (row " +
                                  std::to_string(i) + ")");
  if (names.empty()) {
    names.reserve(static_cast<std::size_t>(x.cols()));
    names.emplace_back("Intercept");
    for (Index j = 1; j < x.cols(); ++j) names.emplace_back("x" + std::to_string(j));
  } else if (names.size() != static_cast<std::size_t>(x.cols())) {
    throw std::invalid_argument("dataset: name count does not match column count");
  }
}

PenaltySpec PenaltySpec::none() { return PenaltySpec{}; }

PenaltySpec PenaltySpec::lasso(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lasso: lambda must be finite and >= 0");
  PenaltySpec s;
  s.kind = PenaltyKind::Lasso;
  s.lambda = lambda;
  return s;
}

PenaltySpec PenaltySpec::adaptive(double lambda, double gamma, VectorXd weights) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("adaptive: lambda must be finite and >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("adaptive: gamma must be finite and > 0");
  for (Index j = 0; j < weights.size(); ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw std::invalid_argument("adaptive: weights must be finite and positive");
  PenaltySpec s;
  s.kind = PenaltyKind::AdaptiveLasso;
  s.lambda = lambda;
  s.gamma = gamma;
  s.weights = std::move(weights);
  return s;
}

VectorXd PenaltySpec::penalty_scale(Index p) const {
  switch (kind) {
    case PenaltyKind::None:
      return VectorXd::Zero(p);
    case PenaltyKind::Lasso:
      return VectorXd::Constant(p, lambda);
    case PenaltyKind::AdaptiveLasso:
      if (weights.size() != p)
        throw std::invalid_argument("adaptive: weight vector length " +
                                    std::to_string(weights.size()) + " does not match p = " +
                                    std::to_string(p));
      return lambda * weights;
  }
  throw std::logic_error("unreachable penalty kind");
}

}  // namespace wildqr
