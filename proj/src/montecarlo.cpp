#include "wildqr/montecarlo.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "wildqr/parallel.hpp"
#include "wildqr/penalty.hpp"
#include "wildqr/rng.hpp"
#include "wildqr/solver.hpp"

namespace wildqr {

PaperDesign::PaperDesign(Index n_in, QuantileLevel tau_in) : n(n_in), tau(tau_in) {
  if (n < 30) throw std::invalid_argument("PaperDesign: n must be at least 30");
}

VectorXd PaperDesign::true_beta() const {
  VectorXd beta = VectorXd::Zero(kSlopes + 1);
  beta[1] = tau.value() == 0.5 ? 0.0 : normal_quantile(tau.value());
  beta[3] = 0.25;
  beta[5] = 0.5;
  beta[7] = 1.0;
  beta[9] = 2.0;
  return beta;
}

Dataset generate(const PaperDesign& design, std::uint64_t seed) {
  const Index n = design.n;
  const Index p = PaperDesign::kSlopes;
  Rng rng(seed);
  MatrixXd x(n, p + 1);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Index j = 1; j <= p; ++j) x(i, j) = rng.normal();
    x(i, 1) = normal_cdf(x(i, 1));
    const double xi = rng.normal();
    y[i] = 0.25 * x(i, 3) + 0.5 * x(i, 5) + x(i, 7) + 2.0 * x(i, 9) + x(i, 1) * xi;
  }
  std::vector<std::string> names(static_cast<std::size_t>(p + 1));
  names[0] = "Intercept";
  for (Index j = 1; j <= p; ++j) names[static_cast<std::size_t>(j)] = "X" + std::to_string(j);
  return Dataset(std::move(y), std::move(x), std::move(names));
}

MatrixXd sandwich_cov(const QuantileLevel& tau, const MatrixXd& d0, const MatrixXd& d1) {
  if (d0.rows() != d0.cols() || d1.rows() != d1.cols() || d0.rows() != d1.rows())
    throw std::invalid_argument("sandwich_cov: dimension mismatch");
  Eigen::LDLT<MatrixXd> chol(d1);
  const double d_max = chol.vectorD().cwiseAbs().maxCoeff();
  if (chol.info() != Eigen::Success || !chol.isPositive() ||
      chol.vectorD().minCoeff() <= 1e-12 * std::max(1.0, d_max))
    throw std::runtime_error("sandwich_cov: D1 is singular or indefinite");
  const MatrixXd inv_d0 = chol.solve(d0);
  MatrixXd s = tau.value() * (1.0 - tau.value()) * chol.solve(inv_d0.transpose()).transpose();
  return 0.5 * (s + s.transpose());
}

OracleCovariance oracle_cov(const PaperDesign& design, Index n_mc, std::uint64_t seed) {
  if (n_mc < 10000) throw std::invalid_argument("oracle_cov: n_mc must be at least 10^4");
  const VectorXd beta = design.true_beta();
  OracleCovariance out;
  out.coords.push_back(0);
  for (Index j = 1; j <= PaperDesign::kSlopes; ++j)
    if (beta[j] != 0.0) out.coords.push_back(j);
  const auto q = static_cast<Index>(out.coords.size());
  const double f_scale = normal_pdf(normal_quantile(design.tau.value()));

  MatrixXd d0 = MatrixXd::Zero(q, q), d1 = MatrixXd::Zero(q, q);
  VectorXd row(q), draw(PaperDesign::kSlopes + 1);
  Rng rng(seed);
  for (Index m = 0; m < n_mc; ++m) {
    draw[0] = 1.0;
    for (Index j = 1; j <= PaperDesign::kSlopes; ++j) draw[j] = rng.normal();
    draw[1] = normal_cdf(draw[1]);
    for (Index k = 0; k < q; ++k) row[k] = draw[out.coords[static_cast<std::size_t>(k)]];
    d0.noalias() += row * row.transpose();
    d1.noalias() += (f_scale / draw[1]) * (row * row.transpose());
  }
  out.d0 = d0 / static_cast<double>(n_mc);
  out.d1 = d1 / static_cast<double>(n_mc);
  out.sandwich = sandwich_cov(design.tau, out.d0, out.d1);
  return out;
}

std::string method_label(const MethodSpec& spec) {
  if (!spec.label.empty()) return spec.label;
  switch (spec.kind) {
    case Method::NewAL:
      return "NewAL(gamma=" + std::to_string(spec.gamma).substr(0, 4) + ")";
    case Method::NewL:
      return spec.a_rule == ANRule::RateN13 ? "NewL(n13)" : "NewL(data)";
    case Method::FullWB:
      return "FullWB";
    case Method::OracleWB:
      return "OracleWB";
    case Method::TwoStepWB:
      return spec.selector == SelectorKind::AdaptiveBIC ? "TSWB(alasso)" : "TSWB(lasso)";
  }
  return "unknown";
}

namespace {

Dataset reduce_columns(const Dataset& data, const std::vector<Index>& slopes) {
  const auto q = static_cast<Index>(slopes.size());
  MatrixXd x(data.n(), q + 1);
  x.col(0) = data.x.col(0);
  std::vector<std::string> names;
  names.push_back(data.names[0]);
  for (Index k = 0; k < q; ++k) {
    x.col(k + 1) = data.x.col(slopes[static_cast<std::size_t>(k)]);
    names.push_back(data.names[static_cast<std::size_t>(slopes[static_cast<std::size_t>(k)])]);
  }
  return Dataset(data.y, std::move(x), std::move(names));
}

// bootstrap the unpenalized fit of the reduced design and map the results
// back to the full coordinate system; unselected slopes report 0 with a [0,0]
// interval
detail::MethodOutcome reduced_wb(const Dataset& data, const QuantileLevel& tau,
                                 const std::vector<Index>& slopes, const WeightLaw& law, Index B,
                                 double alpha, std::uint64_t boot_seed,
                                 const SolverOptions& opts) {
  const Dataset reduced = reduce_columns(data, slopes);
  const BootstrapDraws draws = bootstrap_unpenalized(reduced, tau, law, B, boot_seed, 1, opts);
  const std::vector<ConfidenceInterval> reduced_cis = percentile_ci(draws, alpha);

  detail::MethodOutcome out;
  out.center = VectorXd::Zero(data.p() + 1);
  out.cis.resize(static_cast<std::size_t>(data.p() + 1));
  for (Index j = 0; j <= data.p(); ++j) {
    out.cis[static_cast<std::size_t>(j)] = {0.0, 0.0, 1.0 - alpha, j};
  }
  out.center[0] = draws.center[0];
  out.cis[0].lower = reduced_cis[0].lower;
  out.cis[0].upper = reduced_cis[0].upper;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const Index j = slopes[k];
    out.center[j] = draws.center[static_cast<Index>(k) + 1];
    out.cis[static_cast<std::size_t>(j)].lower = reduced_cis[k + 1].lower;
    out.cis[static_cast<std::size_t>(j)].upper = reduced_cis[k + 1].upper;
  }
  return out;
}

detail::MethodOutcome from_draws(const BootstrapDraws& draws, double alpha) {
  detail::MethodOutcome out;
  out.center = draws.interval_anchor();
  out.cis = percentile_ci(draws, alpha);
  return out;
}

}  // namespace

namespace detail {

MethodOutcome run_method(const MethodSpec& spec, const Dataset& data, const QuantileLevel& tau,
                         const VectorXd& true_beta, Index B, double alpha, LawKind law_kind,
                         std::uint64_t boot_seed, std::uint64_t tune_seed, int cv_folds,
                         Index b_small, const SolverOptions& opts) {
  const WeightLaw law = make_law(law_kind, tau);
  const Index n = data.n();

  switch (spec.kind) {
    case Method::NewAL: {
      const double lambda =
          spec.lambda ? *spec.lambda
                      : bic_select(data, tau, spec.gamma, default_grid(n, data.p()), opts).selected;
      return from_draws(
          bootstrap_adaptive(data, tau, lambda, spec.gamma, law, B, boot_seed, 1, opts), alpha);
    }
    case Method::NewL: {
      const double lambda =
          spec.lambda
              ? *spec.lambda
              : cv_select(data, tau, default_grid(n, data.p()), cv_folds, tune_seed, opts).selected;
      ThresholdSequence seq = ThresholdSequence::rate_n13(n);
      if (spec.a_rule == ANRule::DataDriven) {
        const double a = select_a_n(data, tau, lambda, default_a_candidates(n), law, b_small,
                                    derive_stream(tune_seed, 0xA), spec.source, opts)
                             .selected;
        seq = ThresholdSequence::data_driven(a);
      }
      return from_draws(bootstrap_lasso(data, tau, lambda, seq, law, B, boot_seed, 1, spec.source, opts),
                        alpha);
    }
    case Method::FullWB:
      return from_draws(bootstrap_unpenalized(data, tau, law, B, boot_seed, 1, opts), alpha);
    case Method::OracleWB: {
      std::vector<Index> slopes;
      for (Index j = 1; j < true_beta.size(); ++j)
        if (true_beta[j] != 0.0) slopes.push_back(j);
      return reduced_wb(data, tau, slopes, law, B, alpha, boot_seed, opts);
    }
    case Method::TwoStepWB: {
      std::vector<Index> slopes;
      if (spec.selector == SelectorKind::AdaptiveBIC) {
        const double lambda =
            spec.lambda
                ? *spec.lambda
                : bic_select(data, tau, spec.gamma, default_grid(n, data.p()), opts).selected;
        slopes = fit_adaptive(data, tau, lambda, spec.gamma, opts).active_set;
      } else {
        const double lambda =
            spec.lambda
                ? *spec.lambda
                : cv_select(data, tau, default_grid(n, data.p()), cv_folds, tune_seed, opts)
                      .selected;
        slopes = fit_lasso(data, tau, lambda, opts).active_set;
      }
      return reduced_wb(data, tau, slopes, law, B, alpha, boot_seed, opts);
    }
  }
  throw std::logic_error("run_method: unknown method");
}

}  // namespace detail

namespace {

struct RepOutcome {
  bool ok = false;
  VectorXd length;
  std::vector<char> cover;
  double tp = 0.0, fp = 0.0;
  std::string error;
};

RepOutcome evaluate(const detail::MethodOutcome& mo, const VectorXd& true_beta) {
  RepOutcome out;
  const auto P = true_beta.size();
  out.length.resize(P);
  out.cover.assign(static_cast<std::size_t>(P), 0);
  for (Index j = 0; j < P; ++j) {
    const auto& ci = mo.cis[static_cast<std::size_t>(j)];
    out.length[j] = ci.upper - ci.lower;
    out.cover[static_cast<std::size_t>(j)] =
        ci.lower <= true_beta[j] && true_beta[j] <= ci.upper ? 1 : 0;
  }
  for (Index j = 1; j < P; ++j) {
    const bool truly = true_beta[j] != 0.0;
    const bool picked = mo.center[j] != 0.0;
    if (picked && truly) out.tp += 1.0;
    if (picked && !truly) out.fp += 1.0;
  }
  out.ok = true;
  return out;
}

}  // namespace

SimReport run_study(const StudyConfig& config) {
  if (config.reps < 50) throw std::invalid_argument("run_study: reps must be at least 50");
  if (config.methods.empty()) throw std::invalid_argument("run_study: no methods");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("run_study: alpha must lie in (0,1)");

  const VectorXd true_beta = config.design.true_beta();
  const auto M = static_cast<Index>(config.methods.size());
  const Index R = config.reps;
  std::vector<std::vector<RepOutcome>> slots(static_cast<std::size_t>(M));
  for (auto& v : slots) v.resize(static_cast<std::size_t>(R));

  parallel_for(R, config.threads, [&](Index r) {
    const Dataset data =
        generate(config.design, derive_stream(config.seed, static_cast<std::uint64_t>(r), 0));
    for (Index m = 0; m < M; ++m) {
      const auto mu = static_cast<std::uint64_t>(m);
      const auto ru = static_cast<std::uint64_t>(r);
      auto& slot = slots[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)];
      try {
        const auto outcome = detail::run_method(
            config.methods[static_cast<std::size_t>(m)], data, config.design.tau, true_beta,
            config.B, config.alpha, config.law, derive_stream(config.seed, ru, 2 * mu + 1),
            derive_stream(config.seed, ru, 2 * mu + 2), config.cv_folds, config.b_small,
            config.solver);
        slot = evaluate(outcome, true_beta);
      } catch (const std::exception& e) {
        slot.ok = false;
        slot.error = e.what();
      }
    }
  });

  SimReport report;
  report.n = config.design.n;
  report.tau = config.design.tau.value();
  report.true_beta = true_beta;
  report.reps = R;
  report.B = config.B;
  report.alpha = config.alpha;
  report.seed = config.seed;

  const Index P = true_beta.size();
  std::vector<Index> zero_slopes;
  for (Index j = 1; j < P; ++j)
    if (true_beta[j] == 0.0) zero_slopes.push_back(j);

  for (Index m = 0; m < M; ++m) {
    const auto& col = slots[static_cast<std::size_t>(m)];
    MethodReport mr;
    mr.label = method_label(config.methods[static_cast<std::size_t>(m)]);
    mr.coverage = VectorXd::Zero(P);
    mr.avg_length = VectorXd::Zero(P);
    std::string first_error;
    for (const auto& slot : col) {
      if (!slot.ok) {
        ++mr.failures;
        if (first_error.empty()) first_error = slot.error;
        continue;
      }
      ++mr.reps_used;
      for (Index j = 0; j < P; ++j) {
        mr.coverage[j] += slot.cover[static_cast<std::size_t>(j)];
        mr.avg_length[j] += slot.length[j];
      }
      mr.tp += slot.tp;
      mr.fp += slot.fp;
    }
    if (static_cast<double>(mr.failures) > 0.01 * static_cast<double>(R))
      throw std::runtime_error("run_study: method " + mr.label + " failed on " +
                               std::to_string(mr.failures) + " of " + std::to_string(R) +
                               " replications; first error: " + first_error);
    if (mr.reps_used == 0)
      throw std::runtime_error("run_study: method " + mr.label + " produced no usable reps");
    const double used = static_cast<double>(mr.reps_used);
    mr.coverage /= used;
    mr.avg_length /= used;
    mr.tp /= used;
    mr.fp /= used;
    for (Index j : zero_slopes) {
      mr.zeros_coverage += mr.coverage[j];
      mr.zeros_length += mr.avg_length[j];
    }
    if (!zero_slopes.empty()) {
      mr.zeros_coverage /= static_cast<double>(zero_slopes.size());
      mr.zeros_length /= static_cast<double>(zero_slopes.size());
    }
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace wildqr
