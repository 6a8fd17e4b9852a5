#include "wildqr/weight_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wildqr {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("weight law: " + msg);
}

void check_closure(const WeightLaw& law) {
  double mass = 0.0;
  for (const auto& a : law.atoms) {
    require(a.prob >= 0.0, "negative atom mass");
    mass += a.prob;
  }
  for (const auto& b : law.branches) {
    require(b.prob >= 0.0, "negative branch mass");
    require(b.m_hi > b.m_lo && b.m_lo > 0.0, "branch magnitudes must satisfy 0 < lo < hi");
    require(b.sign == 1.0 || b.sign == -1.0, "branch sign must be +-1");
    mass += b.prob;
  }
  require(std::abs(mass - 1.0) <= 1e-12, "masses must sum to 1");
}

}  // namespace

WeightLaw WeightLaw::custom(const QuantileLevel& tau, std::vector<LawAtom> atoms,
                            std::vector<LawBranch> branches) {
  WeightLaw law;
  law.kind = LawKind::Custom;
  law.tau = tau.value();
  law.atoms = std::move(atoms);
  law.branches = std::move(branches);
  check_closure(law);
  return law;
}

double WeightLaw::pdf(double r) const {
  double d = 0.0;
  for (const auto& b : branches) {
    const double m = r * b.sign;  // magnitude along the branch side
    if (m >= b.m_lo && m <= b.m_hi)
      d += 2.0 * b.prob * m / (b.m_hi * b.m_hi - b.m_lo * b.m_lo);
  }
  return d;
}

double WeightLaw::cdf(double r) const {
  double c = 0.0;
  for (const auto& a : atoms)
    if (a.r <= r) c += a.prob;
  for (const auto& b : branches) {
    const double span = b.m_hi * b.m_hi - b.m_lo * b.m_lo;
    if (b.sign > 0.0) {
      if (r >= b.m_hi)
        c += b.prob;
      else if (r > b.m_lo)
        c += b.prob * (r * r - b.m_lo * b.m_lo) / span;
    } else {
      if (r >= -b.m_lo)
        c += b.prob;
      else if (r > -b.m_hi)
        c += b.prob * (b.m_hi * b.m_hi - r * r) / span;
    }
  }
  return c;
}

double WeightLaw::support_neg_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& a : atoms)
    if (a.r < 0.0 && a.prob > 0.0) m = std::max(m, a.r);
  for (const auto& b : branches)
    if (b.sign < 0.0 && b.prob > 0.0) m = std::max(m, -b.m_lo);
  return m;
}

double WeightLaw::support_pos_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms)
    if (a.r > 0.0 && a.prob > 0.0) m = std::min(m, a.r);
  for (const auto& b : branches)
    if (b.sign > 0.0 && b.prob > 0.0) m = std::min(m, b.m_lo);
  return m;
}

WeightLaw make_law(LawKind kind, const QuantileLevel& tau,
                   const std::map<std::string, double>& params) {
  const double t = tau.value();
  WeightLaw law;
  law.kind = kind;
  law.tau = t;

  switch (kind) {
    case LawKind::TwoPoint: {
      law.atoms = {{2.0 * (1.0 - t), 1.0 - t}, {-2.0 * t, t}};
      break;
    }
    case LawKind::FengContinuous: {
      require(t > 0.125 && t < 0.875, "FengContinuous needs 1/8 < tau < 7/8");
      law.branches = {{-1.0, 2.0 * t - 0.25, 2.0 * t + 0.25, t},
                      {+1.0, 2.0 * (1.0 - t) - 0.25, 2.0 * (1.0 - t) + 0.25, 1.0 - t}};
      break;
    }
    case LawKind::SuppG1: {
      const double v1 = get_param(params, "v1", t / 2.0);
      const double v2 = get_param(params, "v2", (1.0 - t) / 2.0);
      require(v1 > 0.0 && v1 < t, "SuppG1 needs 0 < v1 < tau");
      require(v2 > 0.0 && v2 < 1.0 - t, "SuppG1 needs 0 < v2 < 1 - tau");
      law.params = {{"v1", v1}, {"v2", v2}};
      law.branches = {{-1.0, 2.0 * (t - v1), 2.0 * (t + v1), t},
                      {+1.0, 2.0 * (1.0 - t - v2), 2.0 * (1.0 - t + v2), 1.0 - t}};
      break;
    }
    case LawKind::SuppG2: {
      const double a = get_param(params, "a", t / 2.0);
      const double b = get_param(params, "b", (1.0 - t) / 2.0);
      require(a > 0.0 && a < t, "SuppG2 needs 0 < a < tau");
      require(b > 0.0 && b < 1.0 - t, "SuppG2 needs 0 < b < 1 - tau");
      const double v1 = get_param(params, "v1", a / 2.0);
      const double v2 = get_param(params, "v2", (t - a) / 2.0);
      const double v3 = get_param(params, "v3", b / 2.0);
      const double v4 = get_param(params, "v4", (1.0 - t - b) / 2.0);
      require(v1 > 0.0 && v1 < a, "SuppG2 needs 0 < v1 < a");
      require(v2 > 0.0 && v2 < t - a, "SuppG2 needs 0 < v2 < tau - a");
      require(v3 > 0.0 && v3 < b, "SuppG2 needs 0 < v3 < b");
      require(v4 > 0.0 && v4 < 1.0 - t - b, "SuppG2 needs 0 < v4 < 1 - tau - b");
      law.params = {{"a", a}, {"b", b}, {"v1", v1}, {"v2", v2}, {"v3", v3}, {"v4", v4}};
      law.branches = {{-1.0, 4.0 * (a - v1), 4.0 * (a + v1), a},
                      {-1.0, 4.0 * (t - a - v2), 4.0 * (t - a + v2), t - a},
                      {+1.0, 4.0 * (b - v3), 4.0 * (b + v3), b},
                      {+1.0, 4.0 * (1.0 - t - b - v4), 4.0 * (1.0 - t - b + v4), 1.0 - t - b}};
      break;
    }
    case LawKind::SuppPointMass: {
      const double a = get_param(params, "a", t / 2.0);
      const double b = get_param(params, "b", (1.0 - t) / 2.0);
      require(a > 0.0 && a < t, "SuppPointMass needs 0 < a < tau");
      require(b > 0.0 && b < 1.0 - t, "SuppPointMass needs 0 < b < 1 - tau");
      law.params = {{"a", a}, {"b", b}};
      law.atoms = {{-4.0 * a, a},
                   {-4.0 * (t - a), t - a},
                   {4.0 * b, b},
                   {4.0 * (1.0 - t - b), 1.0 - t - b}};
      break;
    }
    case LawKind::Custom:
      throw std::invalid_argument("weight law: custom laws are not part of the catalogue");
  }
  check_closure(law);
  return law;
}

VectorXd sample(const WeightLaw& law, Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  VectorXd out(n);
  const bool has_branches = !law.branches.empty();
  for (Index i = 0; i < n; ++i) {
    double u = rng.uniform();
    const double u2 = has_branches ? rng.uniform() : 0.0;
    double r = 0.0;
    bool hit = false;
    for (const auto& a : law.atoms) {
      if (u <= a.prob) {
        r = a.r;
        hit = true;
        break;
      }
      u -= a.prob;
    }
    if (!hit) {
      for (const auto& b : law.branches) {
        if (u <= b.prob || &b == &law.branches.back()) {
          const double lo2 = b.m_lo * b.m_lo;
          const double hi2 = b.m_hi * b.m_hi;
          r = b.sign * std::sqrt(lo2 + u2 * (hi2 - lo2));
          hit = true;
          break;
        }
        u -= b.prob;
      }
    }
    if (!hit) r = law.atoms.back().r;  // float dust beyond the last atom
    out[i] = r;
  }
  return out;
}

ConditionReport verify_conditions(const WeightLaw& law, Index mc_samples, double tol,
                                  std::uint64_t seed) {
  if (mc_samples < 10000)
    throw std::invalid_argument("verify_conditions: need at least 1e4 samples");
  Rng rng(seed);
  VectorXd r = sample(law, mc_samples, rng);

  ConditionReport rep;
  const double m = static_cast<double>(mc_samples);
  double neg_max = -std::numeric_limits<double>::infinity();
  double pos_min = std::numeric_limits<double>::infinity();
  Index zeros = 0, neg = 0, nonpos = 0;
  double pos_int = 0.0, neg_int = 0.0, abs_sum = 0.0;
  for (Index i = 0; i < mc_samples; ++i) {
    const double v = r[i];
    abs_sum += std::abs(v);
    if (v == 0.0) {
      ++zeros;
      ++nonpos;
    } else if (v < 0.0) {
      ++neg;
      ++nonpos;
      neg_max = std::max(neg_max, v);
      neg_int += 1.0 / (-v);
    } else {
      pos_min = std::min(pos_min, v);
      pos_int += 1.0 / v;
    }
  }
  rep.c1 = -neg_max;
  rep.c2 = pos_min;
  rep.pos_integral = pos_int / m;
  rep.neg_integral = neg_int / m;
  rep.frac_neg = static_cast<double>(neg) / m;
  rep.frac_nonpos = static_cast<double>(nonpos) / m;
  rep.mean_abs = abs_sum / m;

  std::vector<double> sorted(r.data(), r.data() + mc_samples);
  std::sort(sorted.begin(), sorted.end());
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(m * law.tau)));
  if (k > sorted.size()) k = sorted.size();
  rep.tau_quantile = sorted[k - 1];

  rep.pass_support = zeros == 0 && rep.c1 > tol && rep.c2 > tol;
  rep.pass_integrals =
      std::abs(rep.pos_integral - 0.5) <= tol && std::abs(rep.neg_integral - 0.5) <= tol;
  rep.pass_quantile = rep.frac_neg <= law.tau + tol && law.tau <= rep.frac_nonpos + tol;
  return rep;
}

}  // namespace wildqr
