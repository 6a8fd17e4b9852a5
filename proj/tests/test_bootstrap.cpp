#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "wildqr/bootstrap.hpp"

using namespace wildqr;
using testutil::make_dataset;

namespace {

Dataset medium_fixture() {
  Rng rng(4242);
  const Index n = 30;
  std::vector<double> x1(static_cast<std::size_t>(n)), x2(static_cast<std::size_t>(n)),
      y(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    x1[u] = rng.normal();
    x2[u] = rng.normal();
    y[u] = 0.8 + 1.4 * x1[u] + 0.9 * rng.normal();  // slope 2 is truly zero
  }
  return make_dataset(y, {x1, x2});
}

// weight source reproducing the original residual signs: eps* == eps exactly
detail::WeightSource identity_stub(const Dataset& data, const VectorXd& center) {
  VectorXd eps = data.y - data.x * center;
  return [eps](Index, Index n) {
    VectorXd r(n);
    for (Index i = 0; i < n; ++i) r[i] = eps[i] >= 0.0 ? 1.0 : -1.0;
    return r;
  };
}

}  // namespace

TEST_CASE("wild residuals multiply magnitudes by the weight") {
  VectorXd eps(2), r(2);
  eps << -2.0, 3.0;
  r << -1.0, 1.0;
  VectorXd a = wild_residuals(eps, r);
  CHECK(a[0] == -2.0);
  CHECK(a[1] == 3.0);

  r << 1.0, -1.0;
  VectorXd b = wild_residuals(eps, r);
  CHECK(b[0] == 2.0);
  CHECK(b[1] == -3.0);

  eps << 0.0, 5.0;
  r << -7.0, 1.0;
  CHECK(wild_residuals(eps, r)[0] == 0.0);

  VectorXd wrong(3);
  CHECK_THROWS_AS(wild_residuals(eps, wrong), std::invalid_argument);

  // sign structure on random inputs
  Rng rng(5);
  VectorXd re(50), rw(50);
  for (Index i = 0; i < 50; ++i) {
    re[i] = rng.normal();
    rw[i] = rng.normal() + 0.1;
  }
  VectorXd out = wild_residuals(re, rw);
  for (Index i = 0; i < 50; ++i)
    if (re[i] != 0.0 && rw[i] != 0.0)
      CHECK(std::signbit(out[i]) == std::signbit(rw[i]));
}

TEST_CASE("identity weights reproduce the center fit in every replicate") {
  auto data = medium_fixture();
  QuantileLevel tau(0.5);

  SUBCASE("adaptive") {
    auto center = fit_adaptive(data, tau, 0.5, 1.0);
    auto refit = [&](const Dataset& pseudo) {
      auto pilot = fit_unpenalized(pseudo, tau);
      return fit_adaptive_with_pilot(pseudo, tau, 0.5, 1.0, pilot.beta).beta;
    };
    auto draws = detail::wild_engine(data, center.beta, BootstrapMethod::AdaptiveL1, 8,
                                     identity_stub(data, center.beta), refit, 1);
    REQUIRE(draws.draws.rows() == 8);
    for (Index b = 0; b < draws.draws.rows(); ++b)
      CHECK((draws.draws.row(b).transpose() - center.beta).cwiseAbs().maxCoeff() <= 1e-6);
  }

  SUBCASE("lasso refit recovers the lasso fit of the original data") {
    auto ordinary = fit_unpenalized(data, tau);
    auto lasso = fit_lasso(data, tau, 0.8);
    VectorXd center = threshold_center(ordinary.beta, lasso.beta, ThresholdSequence::fixed(0.05),
                                       ThresholdSource::Ordinary);
    auto refit = [&](const Dataset& pseudo) { return fit_lasso(pseudo, tau, 0.8).beta; };
    auto draws = detail::wild_engine(data, center, BootstrapMethod::ModifiedL1, 8,
                                     identity_stub(data, center), refit, 1);
    for (Index b = 0; b < draws.draws.rows(); ++b)
      CHECK((draws.draws.row(b).transpose() - lasso.beta).cwiseAbs().maxCoeff() <= 1e-6);
  }

  SUBCASE("unpenalized") {
    auto center = fit_unpenalized(data, tau);
    auto refit = [&](const Dataset& pseudo) { return fit_unpenalized(pseudo, tau).beta; };
    auto draws = detail::wild_engine(data, center.beta, BootstrapMethod::Unpenalized, 8,
                                     identity_stub(data, center.beta), refit, 1);
    for (Index b = 0; b < draws.draws.rows(); ++b)
      CHECK((draws.draws.row(b).transpose() - center.beta).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("draws are bit identical across thread counts") {
  auto data = medium_fixture();
  QuantileLevel tau(0.7);
  auto law = make_law(LawKind::TwoPoint, tau);

  auto serial = bootstrap_unpenalized(data, tau, law, 120, 99, 1);
  auto wide = bootstrap_unpenalized(data, tau, law, 120, 99, 4);
  CHECK(serial.draws.rows() == wide.draws.rows());
  CHECK((serial.draws - wide.draws).cwiseAbs().maxCoeff() == 0.0);

  auto a1 = bootstrap_adaptive(data, tau, 0.5, 1.0, law, 100, 7, 1);
  auto a4 = bootstrap_adaptive(data, tau, 0.5, 1.0, law, 100, 7, 4);
  CHECK((a1.draws - a4.draws).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a1.center - a4.center).cwiseAbs().maxCoeff() == 0.0);

  auto l1 = bootstrap_lasso(data, tau, 0.5, ThresholdSequence::rate_n13(data.n()), law, 100, 7, 1);
  auto l4 = bootstrap_lasso(data, tau, 0.5, ThresholdSequence::rate_n13(data.n()), law, 100, 7, 4);
  CHECK((l1.draws - l4.draws).cwiseAbs().maxCoeff() == 0.0);

  // different seed changes the draws
  auto other = bootstrap_unpenalized(data, tau, law, 120, 100, 1);
  CHECK((serial.draws - other.draws).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("intercept-only draws are quantiles of the pseudo data") {
  auto data = make_dataset({1.2, -0.4, 2.5, 0.3, 1.9, -1.1, 0.8, 1.5, -0.2, 0.6}, {});
  // n tau = 3.5 is not an integer, so the check-loss minimizer is unique and
  // equals the type-1 sample quantile
  QuantileLevel tau(0.35);
  auto law = make_law(LawKind::TwoPoint, tau);
  const std::uint64_t seed = 31;
  auto draws = bootstrap_unpenalized(data, tau, law, 100, seed, 1);
  REQUIRE(draws.failures == 0);

  // replicate 17 by hand through the same derived stream
  const Index b = 17;
  Rng rng(derive_stream(seed, static_cast<std::uint64_t>(b)));
  VectorXd r = sample(law, data.n(), rng);
  VectorXd eps = data.y.array() - draws.center[0];
  std::vector<double> ystar(static_cast<std::size_t>(data.n()));
  for (Index i = 0; i < data.n(); ++i)
    ystar[static_cast<std::size_t>(i)] = draws.center[0] + r[i] * std::abs(eps[i]);
  const double q = testutil::quantile_type1(ystar, 0.35);
  CHECK(draws.draws(b, 0) == doctest::Approx(q).epsilon(1e-6));
}

TEST_CASE("percentile intervals follow the order statistic rule") {
  BootstrapDraws d;
  d.center = VectorXd::Constant(1, 1.0);
  d.n = 4;  // sqrt(n) = 2
  d.method = BootstrapMethod::Unpenalized;
  d.draws.resize(4, 1);
  d.draws << 1.0 - 2.0 / 2.0, 1.0 - 1.0 / 2.0, 1.0 + 1.0 / 2.0, 1.0 + 2.0 / 2.0;

  auto cis = percentile_ci(d, 0.5);
  REQUIRE(cis.size() == 1);
  // d quantiles over {-2,-1,1,2}: q(0.75) -> 3rd smallest = 1, q(0.25) -> 1st = -2
  CHECK(cis[0].lower == doctest::Approx(1.0 - 1.0 / 2.0).epsilon(1e-12));
  CHECK(cis[0].upper == doctest::Approx(1.0 + 2.0 / 2.0).epsilon(1e-12));
  CHECK(cis[0].level == doctest::Approx(0.5));
  CHECK(cis[0].coefficient == 0);
}

TEST_CASE("degenerate and symmetric draws") {
  BootstrapDraws d;
  d.center = VectorXd::Constant(1, 0.7);
  d.n = 25;
  d.draws = MatrixXd::Constant(150, 1, 0.7);
  auto cis = percentile_ci(d, 0.05);
  CHECK(cis[0].lower == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(cis[0].upper == doctest::Approx(0.7).epsilon(1e-12));

  BootstrapDraws s;
  s.center = VectorXd::Constant(1, 2.0);
  s.n = 16;
  s.draws.resize(5, 1);
  s.draws << 2.0 - 0.25, 2.0 - 0.125, 2.0, 2.0 + 0.125, 2.0 + 0.25;
  auto sym = percentile_ci(s, 0.5);
  CHECK(sym[0].upper - 2.0 == doctest::Approx(2.0 - sym[0].lower).epsilon(1e-12));
}

TEST_CASE("interval identities and nesting") {
  Rng rng(77);
  BootstrapDraws d;
  d.center = VectorXd::Constant(2, 0.4);
  d.center[1] = -1.2;
  d.n = 49;
  d.draws.resize(200, 2);
  for (Index b = 0; b < 200; ++b) {
    d.draws(b, 0) = 0.4 + 0.3 * rng.normal();
    d.draws(b, 1) = -1.2 + 0.8 * rng.normal();
  }

  const double alpha = 0.1;
  auto cis = percentile_ci(d, alpha);
  for (Index j = 0; j < 2; ++j) {
    std::vector<double> col(200);
    for (Index b = 0; b < 200; ++b) col[static_cast<std::size_t>(b)] = d.draws(b, j);
    const double hi = empirical_quantile(col, 1.0 - alpha / 2.0);
    const double lo = empirical_quantile(col, alpha / 2.0);
    CHECK(cis[static_cast<std::size_t>(j)].lower ==
          doctest::Approx(2.0 * d.center[j] - hi).epsilon(1e-12));
    CHECK(cis[static_cast<std::size_t>(j)].upper ==
          doctest::Approx(2.0 * d.center[j] - lo).epsilon(1e-12));
    CHECK(cis[static_cast<std::size_t>(j)].lower <= cis[static_cast<std::size_t>(j)].upper);
  }

  auto wide = percentile_ci(d, 0.01);
  auto narrow = percentile_ci(d, 0.05);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(wide[j].lower <= narrow[j].lower);
    CHECK(wide[j].upper >= narrow[j].upper);
  }
}

TEST_CASE("modified bootstrap centers on the thresholded fit but anchors on the lasso fit") {
  auto data = medium_fixture();
  QuantileLevel tau(0.5);
  auto law = make_law(LawKind::TwoPoint, tau);
  const double lambda = 0.5;
  const auto seq = ThresholdSequence::rate_n13(data.n());

  auto draws = bootstrap_lasso(data, tau, lambda, seq, law, 100, 7);
  const auto lasso = fit_lasso(data, tau, lambda);
  const auto plain = fit_unpenalized(data, tau);
  const VectorXd thresholded =
      threshold_center(plain.beta, lasso.beta, seq, ThresholdSource::Ordinary);

  REQUIRE(draws.anchor.size() == lasso.beta.size());
  for (Index j = 0; j <= data.p(); ++j) {
    CHECK(draws.anchor[j] == doctest::Approx(lasso.beta[j]).epsilon(1e-12));
    CHECK(draws.center[j] == doctest::Approx(thresholded[j]).epsilon(1e-12));
  }
  CHECK(draws.interval_anchor()[0] == draws.anchor[0]);

  // the interval is the center-relative band translated to the anchor
  auto cis = percentile_ci(draws, 0.1);
  BootstrapDraws recentered = draws;
  recentered.anchor = VectorXd();
  auto base = percentile_ci(recentered, 0.1);
  for (Index j = 0; j <= data.p(); ++j) {
    const double shift = draws.anchor[j] - draws.center[j];
    const auto u = static_cast<std::size_t>(j);
    CHECK(cis[u].lower == doctest::Approx(base[u].lower + shift).epsilon(1e-12));
    CHECK(cis[u].upper == doctest::Approx(base[u].upper + shift).epsilon(1e-12));
  }

  BootstrapDraws bad = draws;
  bad.anchor = VectorXd::Zero(1);
  CHECK_THROWS_AS(percentile_ci(bad, 0.1), std::invalid_argument);
}

TEST_CASE("failure accounting and the one percent ceiling") {
  auto data = medium_fixture();
  QuantileLevel tau(0.5);
  auto center = fit_unpenalized(data, tau);
  auto source = identity_stub(data, center.beta);

  int calls = 0;
  auto flaky = [&](const Dataset& pseudo) {
    if (calls++ == 0) throw SolverError("synthetic failure", 1, 1.0);
    return fit_unpenalized(pseudo, tau).beta;
  };
  auto draws = detail::wild_engine(data, center.beta, BootstrapMethod::Unpenalized, 200, source,
                                   flaky, 1);
  CHECK(draws.failures == 1);
  CHECK(draws.draws.rows() == 199);

  int calls2 = 0;
  auto broken = [&](const Dataset& pseudo) {
    if (calls2++ < 5) throw SolverError("synthetic failure", 1, 1.0);
    return fit_unpenalized(pseudo, tau).beta;
  };
  CHECK_THROWS_AS(detail::wild_engine(data, center.beta, BootstrapMethod::Unpenalized, 200, source,
                                      broken, 1),
                  std::runtime_error);
}

TEST_CASE("public entry points validate inputs") {
  auto data = medium_fixture();
  QuantileLevel tau(0.5);
  auto law = make_law(LawKind::TwoPoint, tau);
  CHECK_THROWS_AS(bootstrap_unpenalized(data, tau, law, 50, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_adaptive(data, tau, -1.0, 1.0, law, 100, 1), std::invalid_argument);
  BootstrapDraws d;
  d.center = VectorXd::Constant(1, 0.0);
  d.n = 4;
  d.draws = MatrixXd::Zero(4, 1);
  CHECK_THROWS_AS(percentile_ci(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile_ci(d, 1.0), std::invalid_argument);
}
