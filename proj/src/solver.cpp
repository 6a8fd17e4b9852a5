#include "wildqr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wildqr {

double check_loss(double u, const QuantileLevel& tau) {
  return u * (tau.value() - (u < 0.0 ? 1.0 : 0.0));
}

double check_loss(const VectorXd& u, const QuantileLevel& tau) {
  const double t = tau.value();
  double s = 0.0;
  for (Index i = 0; i < u.size(); ++i) s += u[i] * (t - (u[i] < 0.0 ? 1.0 : 0.0));
  return s;
}

namespace {

double penalized_objective(const Dataset& data, const QuantileLevel& tau, const VectorXd& lam,
                           const VectorXd& beta, VectorXd& resid) {
  resid = data.y - data.x * beta;
  double obj = check_loss(resid, tau);
  for (Index j = 0; j < lam.size(); ++j) obj += lam[j] * std::abs(beta[j + 1]);
  return obj;
}

double max_step(const VectorXd& v, const VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace

FitResult fit(const Dataset& data, const QuantileLevel& tau, const PenaltySpec& penalty,
              const SolverOptions& opts) {
  const Index n = data.n();
  const Index p = data.p();
  const double t = tau.value();
  if (n < p + 2)
    throw std::invalid_argument("fit: need n >= p + 2, got n = " + std::to_string(n) +
                                ", p = " + std::to_string(p));

  VectorXd lam = penalty.penalty_scale(p);
  std::vector<Index> pen;
  for (Index j = 0; j < p; ++j)
    if (lam[j] > 0.0) pen.push_back(j);

  // Dual LP over a in [0,1]^N: min c'a subject to A a = b, with one column per
  // observation and two pseudo-observation columns (+-lambda_j w_j e_j) per
  // penalized slope; beta recovers as minus the equality multiplier.
  const Index m = static_cast<Index>(pen.size());
  const Index N = n + 2 * m;
  MatrixXd a(p + 1, N);
  a.leftCols(n) = data.x.transpose();
  a.rightCols(2 * m).setZero();
  VectorXd c = VectorXd::Zero(N);
  c.head(n) = -data.y;
  for (Index k = 0; k < m; ++k) {
    const Index j = pen[static_cast<std::size_t>(k)];
    a(j + 1, n + 2 * k) = lam[j];
    a(j + 1, n + 2 * k + 1) = -lam[j];
  }
  const VectorXd b = (1.0 - t) * a.rowwise().sum();

  // exactly feasible interior start
  VectorXd xv = VectorXd::Constant(N, 1.0 - t);
  VectorXd sv = VectorXd::Constant(N, t);
  VectorXd nu = (a * a.transpose()).ldlt().solve(a * c);
  VectorXd rdual = c - a.transpose() * nu;
  VectorXd zv = rdual.cwiseMax(0.0).array() + 1.0;
  VectorXd wv = zv - rdual;

  const double feas_tol = 1e-7 * (1.0 + b.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff());
  VectorXd beta(p + 1), resid(n);
  double gap = 0.0;
  int its = -1;

  VectorXd rb(p + 1), rc(N), ru(N), dvec(N), g(N);
  VectorXd dnu(p + 1), dx(N), ds(N), dz(N), dw(N);
  Eigen::LDLT<MatrixXd> fact;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    beta = -nu;
    double obj = penalized_objective(data, tau, lam, beta, resid);
    gap = xv.dot(zv) + sv.dot(wv);
    rb = b - a * xv;
    rc = c - a.transpose() * nu - zv + wv;
    ru = VectorXd::Ones(N) - xv - sv;
    const bool feas = rb.cwiseAbs().maxCoeff() <= feas_tol &&
                      rc.cwiseAbs().maxCoeff() <= feas_tol &&
                      ru.cwiseAbs().maxCoeff() <= feas_tol;
    if (gap <= opts.gap_tol * (1.0 + std::abs(obj)) && feas) {
      its = iter;
      break;
    }
    if (iter == opts.max_iter)
      throw SolverError("quantile LP hit the iteration cap (" + std::to_string(opts.max_iter) +
                            "), final duality gap " + std::to_string(gap),
                        opts.max_iter, gap);

    dvec = (zv.array() / xv.array() + wv.array() / sv.array()).inverse().matrix();
    fact.compute(a * dvec.asDiagonal() * a.transpose());

    auto newton = [&](const VectorXd& rxz, const VectorXd& rsw) {
      g = rc.array() - rxz.array() / xv.array() +
          (rsw.array() - wv.array() * ru.array()) / sv.array();
      dnu = fact.solve(rb + a * (dvec.asDiagonal() * g));
      dx = dvec.array() * ((a.transpose() * dnu).array() - g.array());
      ds = ru - dx;
      dz = (rxz.array() - zv.array() * dx.array()) / xv.array();
      dw = (rsw.array() - wv.array() * ds.array()) / sv.array();
    };

    // affine scaling (predictor) direction
    newton(-(xv.array() * zv.array()).matrix(), -(sv.array() * wv.array()).matrix());
    if (!dnu.allFinite() || !dx.allFinite() || !dz.allFinite() || !dw.allFinite())
      throw SolverError("quantile LP: numerical breakdown at iteration " + std::to_string(iter),
                        iter, gap);
    double ap = std::min(1.0, 0.9995 * std::min(max_step(xv, dx), max_step(sv, ds)));
    double ad = std::min(1.0, 0.9995 * std::min(max_step(zv, dz), max_step(wv, dw)));
    double gap_aff = (xv + ap * dx).dot(zv + ad * dz) + (sv + ap * ds).dot(wv + ad * dw);
    double sigma = std::pow(std::max(gap_aff, 0.0) / gap, 3);
    double mu = sigma * gap / static_cast<double>(2 * N);

    // Mehrotra corrector reusing the factorization
    VectorXd rxz = (mu - xv.array() * zv.array() - dx.array() * dz.array()).matrix();
    VectorXd rsw = (mu - sv.array() * wv.array() - ds.array() * dw.array()).matrix();
    newton(rxz, rsw);
    if (!dnu.allFinite() || !dx.allFinite() || !dz.allFinite() || !dw.allFinite())
      throw SolverError("quantile LP: numerical breakdown at iteration " + std::to_string(iter),
                        iter, gap);
    ap = std::min(1.0, 0.9995 * std::min(max_step(xv, dx), max_step(sv, ds)));
    ad = std::min(1.0, 0.9995 * std::min(max_step(zv, dz), max_step(wv, dw)));

    xv += ap * dx;
    sv += ap * ds;
    nu += ad * dnu;
    zv += ad * dz;
    wv += ad * dw;
  }

  // snap slope dust to exact zero and report everything at the snapped point
  for (Index j = 1; j <= p; ++j)
    if (std::abs(beta[j]) < opts.zero_cutoff) beta[j] = 0.0;

  FitResult out;
  out.beta = beta;
  out.objective = penalized_objective(data, tau, lam, beta, resid);
  out.residuals = resid;
  for (Index j = 1; j <= p; ++j)
    if (beta[j] != 0.0) out.active_set.push_back(j);
  out.iterations = its;
  out.kkt_gap = kkt_residual(out, data, tau, penalty);

  const double kkt_tol = opts.kkt_factor * static_cast<double>(n) * data.x.cwiseAbs().maxCoeff();
  if (out.kkt_gap > kkt_tol)
    throw SolverError("quantile LP: KKT certificate " + std::to_string(out.kkt_gap) +
                          " exceeds tolerance " + std::to_string(kkt_tol),
                      its, gap);
  return out;
}

double kkt_residual(const FitResult& fit, const Dataset& data, const QuantileLevel& tau,
                    const PenaltySpec& penalty, double zero_tol) {
  const Index n = data.n();
  const Index p = data.p();
  const double t = tau.value();
  if (fit.beta.size() != p + 1)
    throw std::invalid_argument("kkt_residual: beta length does not match data");
  if (zero_tol < 0.0) zero_tol = 1e-7 * (1.0 + data.y.cwiseAbs().maxCoeff());

  const VectorXd resid = data.y - data.x * fit.beta;
  const VectorXd lam = penalty.penalty_scale(p);

  double worst = 0.0;
  for (Index j = 0; j <= p; ++j) {
    double lo = 0.0, hi = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double xij = data.x(i, j);
      if (std::abs(resid[i]) <= zero_tol) {
        const double e1 = -xij * (t - 1.0);
        const double e2 = -xij * t;
        lo += std::min(e1, e2);
        hi += std::max(e1, e2);
      } else {
        const double v = -xij * (t - (resid[i] < 0.0 ? 1.0 : 0.0));
        lo += v;
        hi += v;
      }
    }
    if (j >= 1 && lam[j - 1] > 0.0) {
      if (fit.beta[j] != 0.0) {
        const double v = lam[j - 1] * (fit.beta[j] > 0.0 ? 1.0 : -1.0);
        lo += v;
        hi += v;
      } else {
        lo -= lam[j - 1];
        hi += lam[j - 1];
      }
    }
    const double dist = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
    worst = std::max(worst, dist);
  }
  return worst;
}

FitResult brute_force_fit(const Dataset& data, const QuantileLevel& tau,
                          const PenaltySpec& penalty, const GridSpec& grid) {
  const Index n = data.n();
  const Index p = data.p();
  if (p > 2) throw std::invalid_argument("brute_force_fit: only p <= 2 is supported");
  if (grid.lo.size() != p + 1 || grid.hi.size() != p + 1)
    throw std::invalid_argument("brute_force_fit: grid box must have p + 1 coordinates");
  if (!(grid.step > 0.0)) throw std::invalid_argument("brute_force_fit: step must be positive");

  std::vector<Index> counts(static_cast<std::size_t>(p + 1));
  double cells = 1.0;
  for (Index j = 0; j <= p; ++j) {
    if (grid.hi[j] < grid.lo[j])
      throw std::invalid_argument("brute_force_fit: empty box in coordinate " + std::to_string(j));
    counts[static_cast<std::size_t>(j)] =
        static_cast<Index>(std::floor((grid.hi[j] - grid.lo[j]) / grid.step + 1e-9)) + 1;
    cells *= static_cast<double>(counts[static_cast<std::size_t>(j)]);
  }
  if (cells > 1e8) throw std::invalid_argument("brute_force_fit: grid exceeds the cell cap");

  const VectorXd lam = penalty.penalty_scale(p);
  VectorXd beta = grid.lo, best_beta = grid.lo;
  VectorXd resid(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> idx(static_cast<std::size_t>(p + 1), 0);

  // odometer over the lattice; earlier coordinates vary slowest so the first
  // minimum found is the lexicographically smallest tie
  bool done = false;
  while (!done) {
    double obj = 0.0;
    for (Index i = 0; i < n; ++i) {
      double u = data.y[i];
      for (Index j = 0; j <= p; ++j) u -= data.x(i, j) * beta[j];
      obj += u * (tau.value() - (u < 0.0 ? 1.0 : 0.0));
    }
    for (Index j = 0; j < p; ++j) obj += lam[j] * std::abs(beta[j + 1]);
    if (obj < best) {
      best = obj;
      best_beta = beta;
    }
    Index j = p;
    for (;;) {
      auto uj = static_cast<std::size_t>(j);
      if (++idx[uj] < counts[uj]) {
        beta[j] = grid.lo[j] + grid.step * static_cast<double>(idx[uj]);
        break;
      }
      idx[uj] = 0;
      beta[j] = grid.lo[j];
      if (j == 0) {
        done = true;
        break;
      }
      --j;
    }
  }

  FitResult out;
  out.beta = best_beta;
  out.residuals = data.y - data.x * best_beta;
  out.objective = best;
  for (Index j = 1; j <= p; ++j)
    if (std::abs(best_beta[j]) >= 1e-8) out.active_set.push_back(j);
  out.kkt_gap = kkt_residual(out, data, tau, penalty);
  out.iterations = 0;
  return out;
}

}  // namespace wildqr
