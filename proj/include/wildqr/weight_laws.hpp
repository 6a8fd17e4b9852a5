#pragma once

#include <map>
#include <string>
#include <vector>

#include "wildqr/rng.hpp"
#include "wildqr/types.hpp"

namespace wildqr {

enum class LawKind { TwoPoint, FengContinuous, SuppG1, SuppG2, SuppPointMass, Custom };

// Point mass at r with probability prob.
struct LawAtom {
  double r;
  double prob;
};

// Density branch c*|r| supported on sign*[m_lo, m_hi] (0 < m_lo < m_hi),
// carrying total mass prob. All catalogue densities are piecewise linear in
// r, so branches sample exactly by inverting a quadratic cdf.
struct LawBranch {
  double sign;  // +1 or -1
  double m_lo;
  double m_hi;
  double prob;
};

struct WeightLaw {
  LawKind kind = LawKind::Custom;
  double tau = 0.5;
  std::map<std::string, double> params;  // resolved law parameters
  std::vector<LawAtom> atoms;
  std::vector<LawBranch> branches;

  double pdf(double r) const;  // continuous part only
  double cdf(double r) const;
  double support_neg_max() const;  // -c1, the largest negative support point
  double support_pos_min() const;  // c2, the smallest positive support point

  // Escape hatch for verifying non-catalogue laws; the CLI never builds these.
  static WeightLaw custom(const QuantileLevel& tau, std::vector<LawAtom> atoms,
                          std::vector<LawBranch> branches);
};

// Catalogue constructor. Parameters (a, b, v1..v4) default to midpoints of
// their admissible intervals when not supplied.
WeightLaw make_law(LawKind kind, const QuantileLevel& tau,
                   const std::map<std::string, double>& params = {});

// i.i.d. draws; deterministic given the stream. Branch laws consume two
// uniforms per draw, atom-only laws one.
VectorXd sample(const WeightLaw& law, Index n, Rng& rng);

struct ConditionReport {
  double c1 = 0.0, c2 = 0.0;        // estimated support gap endpoints (as positives)
  double pos_integral = 0.0;        // MC estimate of the positive half-line integral of 1/r
  double neg_integral = 0.0;        // MC estimate of minus the negative half-line integral
  double tau_quantile = 0.0;        // empirical type-1 tau-quantile of the draws
  double frac_neg = 0.0;            // fraction of draws < 0
  double frac_nonpos = 0.0;         // fraction of draws <= 0
  double mean_abs = 0.0;            // E|r|, finite for every bounded-support law
  bool pass_support = false;        // Condition 3
  bool pass_integrals = false;      // Condition 4
  bool pass_quantile = false;       // Condition 5
  bool pass() const { return pass_support && pass_integrals && pass_quantile; }
};

ConditionReport verify_conditions(const WeightLaw& law, Index mc_samples, double tol,
                                  std::uint64_t seed = 0x77eed5u);

}  // namespace wildqr
