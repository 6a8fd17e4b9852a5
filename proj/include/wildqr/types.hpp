#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildqr {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Quantile level, strictly inside (0,1).
class QuantileLevel {
 public:
  explicit QuantileLevel(double tau);
  double value() const { return tau_; }

 private:
  double tau_;
};

// Regression data with an explicit all-ones intercept column (column 0).
struct Dataset {
  VectorXd y;                      // length n
  MatrixXd x;                      // n x (p+1)
  std::vector<std::string> names;  // length p+1, "Intercept", then covariates

  Dataset(VectorXd y_in, MatrixXd x_in, std::vector<std::string> names_in = {});

  Index n() const { return y.size(); }
  Index p() const { return x.cols() - 1; }
};

enum class PenaltyKind { None, Lasso, AdaptiveLasso };

// Penalty configuration. The objective adds lambda * sum_j w_j |beta_j| over
// slopes; w_j = 1 for the plain lasso. Weights must be finite and positive;
// infinite weights (excluded coefficients) are resolved upstream by dropping
// the coordinate before the solver sees it.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::None;
  double lambda = 0.0;
  double gamma = 1.0;  // adaptive exponent, carried for provenance
  VectorXd weights;    // per-slope weights, adaptive only (length p)

  static PenaltySpec none();
  static PenaltySpec lasso(double lambda);
  static PenaltySpec adaptive(double lambda, double gamma, VectorXd weights);

  // Effective per-slope penalty scale lambda * w_j, length p.
  VectorXd penalty_scale(Index p) const;
};

struct FitResult {
  VectorXd beta;       // p+1, intercept first
  VectorXd residuals;  // recomputed as y - x*beta
  double objective = 0.0;
  std::vector<Index> active_set;  // slope indices j in 1..p with beta[j] != 0
  double kkt_gap = 0.0;
  int iterations = 0;
};

// Linear programming failure: iteration cap or numerical breakdown.
struct SolverError : std::runtime_error {
  int iterations;
  double gap;
  SolverError(const std::string& msg, int iterations_in, double gap_in)
      : std::runtime_error(msg), iterations(iterations_in), gap(gap_in) {}
};

}  // namespace wildqr
