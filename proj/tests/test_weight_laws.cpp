#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "wildqr/weight_laws.hpp"

using namespace wildqr;

namespace {

// Simpson on [lo, hi]; exact for the piecewise-linear densities as long as no
// kink lies inside the interval.
double simpson(const WeightLaw& law, double lo, double hi, int panels) {
  double h = (hi - lo) / panels;
  double s = law.pdf(lo) + law.pdf(hi);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * law.pdf(lo + k * h);
  return s * h / 3.0;
}

double continuous_mass(const WeightLaw& law) {
  std::set<double> cuts;
  for (const auto& b : law.branches) {
    cuts.insert(b.sign * b.m_lo);
    cuts.insert(b.sign * b.m_hi);
  }
  std::vector<double> pts(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    // nudge off the endpoints: the density jumps exactly there and the
    // integrand is linear strictly inside each segment
    const double eps = 1e-10 * (1.0 + std::abs(pts[k]) + std::abs(pts[k + 1]));
    if (pts[k + 1] - pts[k] < 4.0 * eps) continue;
    total += simpson(law, pts[k] + eps, pts[k + 1] - eps, 64);
  }
  return total;
}

std::vector<WeightLaw> catalogue(double t) {
  QuantileLevel tau(t);
  return {make_law(LawKind::TwoPoint, tau), make_law(LawKind::FengContinuous, tau),
          make_law(LawKind::SuppG1, tau), make_law(LawKind::SuppG2, tau),
          make_law(LawKind::SuppPointMass, tau)};
}

}  // namespace

TEST_CASE("two point law matches the closed form") {
  auto half = make_law(LawKind::TwoPoint, QuantileLevel(0.5));
  REQUIRE(half.atoms.size() == 2);
  CHECK(half.atoms[0].r == doctest::Approx(1.0));
  CHECK(half.atoms[0].prob == doctest::Approx(0.5));
  CHECK(half.atoms[1].r == doctest::Approx(-1.0));
  CHECK(half.atoms[1].prob == doctest::Approx(0.5));

  auto seventy = make_law(LawKind::TwoPoint, QuantileLevel(0.7));
  CHECK(seventy.atoms[0].r == doctest::Approx(0.6));
  CHECK(seventy.atoms[0].prob == doctest::Approx(0.3));
  CHECK(seventy.atoms[1].r == doctest::Approx(-1.4));
  CHECK(seventy.atoms[1].prob == doctest::Approx(0.7));
}

TEST_CASE("parameter constraints are enforced") {
  CHECK_THROWS_AS(make_law(LawKind::FengContinuous, QuantileLevel(0.05)), std::invalid_argument);
  CHECK_THROWS_AS(make_law(LawKind::FengContinuous, QuantileLevel(0.125)), std::invalid_argument);
  CHECK_THROWS_AS(make_law(LawKind::SuppG1, QuantileLevel(0.5), {{"v1", 0.6}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_law(LawKind::SuppG2, QuantileLevel(0.5), {{"a", 0.3}, {"v1", 0.4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_law(LawKind::SuppPointMass, QuantileLevel(0.3), {{"a", 0.3}}),
                  std::invalid_argument);
}

TEST_CASE("every catalogue law passes the condition verifier") {
  for (double t : {0.3, 0.5, 0.7}) {
    for (const auto& law : catalogue(t)) {
      auto rep = verify_conditions(law, 100000, 0.02);
      CAPTURE(static_cast<int>(law.kind));
      CAPTURE(t);
      CHECK(rep.pass_support);
      CHECK(rep.pass_integrals);
      CHECK(rep.pass_quantile);
      CHECK(rep.mean_abs > 0.0);
      CHECK(std::isfinite(rep.mean_abs));
    }
  }
}

TEST_CASE("atom arithmetic for the catalogue laws") {
  // positive-side integral of 1/r for TwoPoint at tau=0.7: 0.3 / 0.6 = 0.5
  auto law = make_law(LawKind::TwoPoint, QuantileLevel(0.7));
  double pos = 0.0;
  for (const auto& a : law.atoms)
    if (a.r > 0.0) pos += a.prob / a.r;
  CHECK(pos == doctest::Approx(0.5).epsilon(1e-12));

  auto pm = make_law(LawKind::SuppPointMass, QuantileLevel(0.5), {{"a", 0.25}, {"b", 0.25}});
  auto rep = verify_conditions(pm, 100000, 0.02);
  CHECK(rep.pass_support);
  CHECK(rep.pass_integrals);
  CHECK(rep.pass_quantile);
}

TEST_CASE("a mis-weighted two point law fails condition 5") {
  auto broken = WeightLaw::custom(QuantileLevel(0.7), {{0.6, 0.5}, {-1.4, 0.5}}, {});
  auto rep = verify_conditions(broken, 100000, 0.02);
  CHECK_FALSE(rep.pass_quantile);
  CHECK_FALSE(rep.pass());
  // its empirical 0.7-quantile sits at the positive atom, far from 0
  CHECK(rep.tau_quantile == doctest::Approx(0.6));
}

TEST_CASE("sampling respects the support gap and is deterministic") {
  for (double t : {0.3, 0.7}) {
    for (const auto& law : catalogue(t)) {
      Rng r1(2024), r2(2024), r3(7);
      auto a = sample(law, 20000, r1);
      auto b = sample(law, 20000, r2);
      auto c = sample(law, 20000, r3);
      CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
      CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
      const double c1 = -law.support_neg_max();
      const double c2 = law.support_pos_min();
      CHECK(c1 > 0.0);
      CHECK(c2 > 0.0);
      for (Index i = 0; i < a.size(); ++i) {
        const bool outside = a[i] <= -c1 + 1e-12 || a[i] >= c2 - 1e-12;
        if (!outside) {
          CAPTURE(a[i]);
          CHECK(outside);
        }
      }
    }
  }
}

TEST_CASE("sign frequencies match tau through a residual magnitude") {
  for (double t : {0.3, 0.5, 0.7}) {
    for (const auto& law : catalogue(t)) {
      Rng rng(91);
      auto r = sample(law, 100000, rng);
      for (double m : {0.3, 2.5}) {
        Index neg = 0, nonpos = 0;
        for (Index i = 0; i < r.size(); ++i) {
          const double v = r[i] * m;
          if (v < 0.0) ++neg;
          if (v <= 0.0) ++nonpos;
        }
        const double fn = static_cast<double>(neg) / static_cast<double>(r.size());
        const double fnp = static_cast<double>(nonpos) / static_cast<double>(r.size());
        CHECK(fn <= t + 0.01);
        CHECK(fnp >= t - 0.01);
      }
    }
  }
}

TEST_CASE("densities integrate to one and cdfs close at tau below the gap") {
  for (double t : {0.2, 0.5, 0.8}) {
    QuantileLevel tau(t);
    for (auto kind : {LawKind::FengContinuous, LawKind::SuppG1, LawKind::SuppG2}) {
      if (kind == LawKind::FengContinuous && (t <= 0.125 || t >= 0.875)) continue;
      auto law = make_law(kind, tau);
      CHECK(continuous_mass(law) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(law.cdf(law.support_neg_max()) == doctest::Approx(t).epsilon(1e-12));
      CHECK(law.cdf(law.support_pos_min() * (1.0 - 1e-9)) == doctest::Approx(t).epsilon(1e-9));
    }
    for (auto kind : {LawKind::TwoPoint, LawKind::SuppPointMass}) {
      auto law = make_law(kind, tau);
      double mass = 0.0;
      for (const auto& a : law.atoms) mass += a.prob;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(law.cdf(law.support_neg_max()) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("custom construction validates closure") {
  CHECK_THROWS_AS(WeightLaw::custom(QuantileLevel(0.5), {{1.0, 0.7}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(WeightLaw::custom(QuantileLevel(0.5), {}, {{1.0, -0.5, 1.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_law(LawKind::Custom, QuantileLevel(0.5)), std::invalid_argument);
}
