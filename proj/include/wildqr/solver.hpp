#pragma once

#include "wildqr/types.hpp"

namespace wildqr {

struct SolverOptions {
  double gap_tol = 1e-9;      // duality gap tolerance, scaled by 1 + |objective|
  int max_iter = 200;         // interior point iteration cap
  double zero_cutoff = 1e-8;  // slope magnitudes below this are snapped to zero
  double kkt_factor = 1e-6;   // certificate tolerance is kkt_factor * n * max|x|
};

// rho_tau(u) = u * (tau - 1{u < 0})
double check_loss(double u, const QuantileLevel& tau);
double check_loss(const VectorXd& u, const QuantileLevel& tau);

// Penalized quantile regression via the Frisch-Newton primal-dual interior
// point method on the bounded-variable dual LP. The weighted L1 penalty is
// folded in as pseudo-observations (y = 0, x = +-lambda_j w_j e_j), so the
// penalized problem is an unpenalized fit on n + 2m rows. Throws SolverError
// on iteration cap or numerical breakdown.
FitResult fit(const Dataset& data, const QuantileLevel& tau, const PenaltySpec& penalty,
              const SolverOptions& opts = {});

// Max over coordinates of the distance from 0 to the objective's
// subdifferential interval at fit.beta. Residuals within zero_tol of 0 are
// treated as ties and contribute their full [tau-1, tau] interval; pass a
// negative zero_tol to use the default 1e-7 * (1 + max|y|).
double kkt_residual(const FitResult& fit, const Dataset& data, const QuantileLevel& tau,
                    const PenaltySpec& penalty, double zero_tol = -1.0);

// Exhaustive grid search oracle. Evaluates the exact objective at every point
// of a per-coordinate lattice and keeps the minimum, ties broken by
// lexicographically smallest beta. Refuses p > 2 and grids above the cell cap.
struct GridSpec {
  VectorXd lo;   // length p+1
  VectorXd hi;   // length p+1
  double step = 1e-3;
};

FitResult brute_force_fit(const Dataset& data, const QuantileLevel& tau,
                          const PenaltySpec& penalty, const GridSpec& grid);

}  // namespace wildqr
