#include "qbicoh/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "qbicoh/errors.hpp"

namespace qbicoh {

namespace {

// a_i = 1 - (1 - q^2) J_i = <[A_i, A_i^dag]>.
struct CommutatorWeights {
  double a1, a2;
};

CommutatorWeights weights(const CoherentLabel& label, const ModelParams& p) {
  const double d = 1.0 - p.q().squared();
  return {1.0 - d * label.J1, 1.0 - d * label.J2};
}

double checked_variance(double v, const char* name) {
  if (v >= 0.0) return v;
  if (v >= -kNegativeVarianceSlack) {
    std::clog << "warning: clamping round-off negative " << name << " = " << v
              << " to 0\n";
    return 0.0;
  }
  throw InvariantError(std::string("negative variance ") + name + " = " +
                       std::to_string(v));
}

}  // namespace

VarianceSet variances_unchecked(const CoherentLabel& label,
                                const ModelParams& p, const GBundle& g) {
  const double s = 1.0 + p.q().squared();
  const double c = 1.0 / (4.0 * p.Lambda * p.Lambda);
  const double hb2 = p.hbar() * p.hbar();
  const double rk = std::sqrt(p.K1 * p.K2);
  const double l1 = p.lambda1, l2 = p.lambda2;

  // Squares of the purely imaginary G_s are real and <= 0.
  const double gs1_sq = (g.Gs1 * g.Gs1).real();
  const double gs2_sq = (g.Gs2 * g.Gs2).real();
  const double gs12 = (g.Gs1 * g.Gs2).real();

  const double cos1 = 1.0 + s * label.J1 + g.Gq1 - g.Gc1 * g.Gc1;
  const double cos2 = 1.0 + s * label.J2 + g.Gq2 - g.Gc2 * g.Gc2;
  const double sin1 = 1.0 + s * label.J1 - g.Gq1 + gs1_sq;
  const double sin2 = 1.0 + s * label.J2 - g.Gq2 + gs2_sq;

  VarianceSet v;
  v.chi1 = hb2 * c * (p.K1 * cos1 + p.K2 * cos2) +
           2.0 * hb2 * c * rk * (-g.Gc_plus - g.Gc_minus + g.Gc1 * g.Gc2);
  v.chi2 = hb2 * c * (p.K1 * sin1 + p.K2 * sin2) +
           2.0 * hb2 * c * rk * (-g.Gc_plus + g.Gc_minus + gs12);
  v.kappa1 = c * (l2 * l2 * p.K1 * sin1 + l1 * l1 * p.K2 * sin2) +
             2.0 * c * l1 * l2 * rk * (g.Gc_plus - g.Gc_minus - gs12);
  v.kappa2 = c * (l2 * l2 * p.K1 * cos1 + l1 * l1 * p.K2 * cos2) +
             2.0 * c * l1 * l2 * rk * (g.Gc_plus + g.Gc_minus - g.Gc1 * g.Gc2);
  return v;
}

VarianceSet variances_closed_form(const CoherentLabel& label,
                                  const ModelParams& p, const GBundle& g) {
  VarianceSet v = variances_unchecked(label, p, g);
  v.chi1 = checked_variance(v.chi1, "chi1");
  v.chi2 = checked_variance(v.chi2, "chi2");
  v.kappa1 = checked_variance(v.kappa1, "kappa1");
  v.kappa2 = checked_variance(v.kappa2, "kappa2");
  return v;
}

double RhsBounds::operator[](CanonicalPair pair) const {
  switch (pair) {
    case CanonicalPair::X1X2: return x1x2;
    case CanonicalPair::X1P1: return x1p1;
    case CanonicalPair::X2P2: return x2p2;
    case CanonicalPair::P1P2: return p1p2;
    case CanonicalPair::X1P2:
    case CanonicalPair::X2P1: return 0.0;
  }
  return 0.0;
}

std::array<Complex, 6> commutator_means(const CoherentLabel& label,
                                        const ModelParams& p) {
  const auto [a1, a2] = weights(label, p);
  const Complex I(0.0, 1.0);
  const double L2 = 2.0 * p.Lambda * p.Lambda;
  const double hbar = p.hbar();
  const double l1 = p.lambda1, l2 = p.lambda2;
  const Complex xp = I * hbar / L2 * (l2 * p.K1 * a1 + l1 * p.K2 * a2);
  return {I * hbar * hbar / L2 * (p.K1 * a1 - p.K2 * a2),
          xp,
          xp,
          I / L2 * (l2 * l2 * p.K1 * a1 - l1 * l1 * p.K2 * a2),
          Complex{},
          Complex{}};
}

RhsBounds commutator_rhs(const CoherentLabel& label, const ModelParams& p) {
  const auto [a1, a2] = weights(label, p);
  const double c = 1.0 / (4.0 * p.Lambda * p.Lambda);
  const double hbar = p.hbar();
  const double l1 = p.lambda1, l2 = p.lambda2;
  RhsBounds r;
  r.x1x2 = hbar * hbar * c * std::abs(p.K1 * a1 - p.K2 * a2);
  r.x1p1 = hbar * c * std::abs(l2 * p.K1 * a1 + l1 * p.K2 * a2);
  r.x2p2 = r.x1p1;
  r.p1p2 = c * std::abs(l2 * l2 * p.K1 * a1 - l1 * l1 * p.K2 * a2);
  return r;
}

std::array<GurReport, 6> gur_report(const VarianceSet& v, const RhsBounds& rhs,
                                    const GurOptions& opts) {
  auto product = [&](CanonicalPair pair) {
    switch (pair) {
      case CanonicalPair::X1X2: return v.chi1 * v.chi2;
      case CanonicalPair::X1P1: return v.chi1 * v.kappa1;
      case CanonicalPair::X2P2: return v.chi2 * v.kappa2;
      case CanonicalPair::P1P2: return v.kappa1 * v.kappa2;
      case CanonicalPair::X1P2: return v.chi1 * v.kappa2;
      case CanonicalPair::X2P1: return v.chi2 * v.kappa1;
    }
    return 0.0;
  };
  std::array<GurReport, 6> out;
  for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
    GurReport& r = out[i];
    r.pair = kAllPairs[i];
    r.lhs = std::sqrt(product(r.pair));
    r.rhs = rhs[r.pair];
    if (r.rhs > 0.0) {
      r.ratio = r.lhs / r.rhs;
    } else {
      r.ratio = r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    r.satisfied = r.lhs + opts.tol * std::max(1.0, r.rhs) >= r.rhs;
    r.saturated = std::abs(r.lhs - r.rhs) <= opts.saturation_tol * r.rhs;
  }
  return out;
}

std::array<GurReport, 6> gur_report(const CoherentLabel& label,
                                    const ModelParams& params,
                                    const GurOptions& opts) {
  return analyze_point(label, params, opts).gur;
}

bool FeasibilityConditions::all_nonnegative() const {
  return p1 >= 0.0 && p2 >= 0.0 && p3 >= 0.0 && p4 >= 0.0;
}

FeasibilityConditions feasibility_conditions(const CoherentLabel& label,
                                             const ModelParams& p,
                                             const GBundle& g) {
  const double k1 = p.K1, k2 = p.K2;
  const double r1 = std::sqrt(k1), r2 = std::sqrt(k2), rk = r1 * r2;
  const double l1 = p.lambda1, l2 = p.lambda2;
  const double J1 = label.J1, J2 = label.J2;

  FeasibilityConditions f;
  const double dc1 = r1 * g.Gc1 - r2 * g.Gc2;
  f.p1 = k1 * (2.0 * J1 + g.Gq1) + k2 * (2.0 * J2 + g.Gq2) -
         2.0 * rk * (g.Gc_plus + g.Gc_minus) - dc1 * dc1;
  const Complex ss2 = r1 * g.Gs1 + r2 * g.Gs2;
  f.p2 = k1 * (2.0 * J1 - g.Gq1) + k2 * (2.0 * J2 - g.Gq2) -
         2.0 * rk * (g.Gc_plus - g.Gc_minus) + (ss2 * ss2).real();
  const Complex ss3 = l2 * r1 * g.Gs1 - l1 * r2 * g.Gs2;
  f.p3 = l2 * l2 * k1 * (2.0 * J1 - g.Gq1) + l1 * l1 * k2 * (2.0 * J2 - g.Gq2) +
         2.0 * l1 * l2 * rk * (g.Gc_plus - g.Gc_minus) + (ss3 * ss3).real();
  // The momentum-P2 condition pairs with the cosine-type variance, so the
  // squared bracket carries Gc (the printed form shows Gs there).
  const double cc4 = l2 * r1 * g.Gc1 + l1 * r2 * g.Gc2;
  f.p4 = l2 * l2 * k1 * (2.0 * J1 + g.Gq1) + l1 * l1 * k2 * (2.0 * J2 + g.Gq2) +
         2.0 * l1 * l2 * rk * (g.Gc_plus + g.Gc_minus) - cc4 * cc4;

  f.reduced1 = 4.0 * J1 - g.Gc1 * g.Gc1 + (g.Gs1 * g.Gs1).real();
  f.reduced2 = 4.0 * J2 - g.Gc2 * g.Gc2 + (g.Gs2 * g.Gs2).real();
  f.reduced_cross = 2.0 * g.Gc_plus - (g.Gc1 * g.Gc2 + (g.Gs1 * g.Gs2).real());
  return f;
}

CanonicalMoments closed_form_moments(const CoherentLabel& label,
                                     const ModelParams& p, const GBundle& g) {
  const Complex I(0.0, 1.0);
  const double s = 1.0 + p.q().squared();
  const double w1 = std::sqrt(p.K1) / (2.0 * p.Lambda);
  const double w2 = std::sqrt(p.K2) / (2.0 * p.Lambda);
  const double hbar = p.hbar();

  // Coefficients of (A_i + A_i^dag) or (A_i - A_i^dag) in each operator.
  const Complex x1a = -hbar * w1, x1b = hbar * w2;
  const Complex x2a = I * hbar * w1, x2b = I * hbar * w2;
  const Complex p1a = I * p.lambda2 * w1, p1b = -I * p.lambda1 * w2;
  const Complex p2a = p.lambda2 * w1, p2b = p.lambda1 * w2;

  const Complex plus1 = 1.0 + s * label.J1 + g.Gq1;   // <(A1 + A1^dag)^2>
  const Complex plus2 = 1.0 + s * label.J2 + g.Gq2;
  const Complex minus1 = g.Gq1 - 1.0 - s * label.J1;  // <(A1 - A1^dag)^2>
  const Complex minus2 = g.Gq2 - 1.0 - s * label.J2;
  const Complex cross_plus = g.Gc_plus + g.Gc_minus;   // <(A1+A1d)(A2+A2d)>
  const Complex cross_minus = g.Gc_plus - g.Gc_minus;  // <(A1-A1d)(A2-A2d)>

  CanonicalMoments m;
  // <A_i + A_i^dag> = Gc_i, <A_i - A_i^dag> = -Gs_i.
  m.mean[0] = x1a * g.Gc1 + x1b * g.Gc2;
  m.mean[1] = -(x2a * g.Gs1 + x2b * g.Gs2);
  m.mean[2] = -(p1a * g.Gs1 + p1b * g.Gs2);
  m.mean[3] = p2a * g.Gc1 + p2b * g.Gc2;
  m.square[0] = x1a * x1a * plus1 + x1b * x1b * plus2 + 2.0 * x1a * x1b * cross_plus;
  m.square[1] = x2a * x2a * minus1 + x2b * x2b * minus2 + 2.0 * x2a * x2b * cross_minus;
  m.square[2] = p1a * p1a * minus1 + p1b * p1b * minus2 + 2.0 * p1a * p1b * cross_minus;
  m.square[3] = p2a * p2a * plus1 + p2b * p2b * plus2 + 2.0 * p2a * p2b * cross_plus;
  return m;
}

PointAnalysis analyze_point(const CoherentLabel& label, const ModelParams& params,
                            const GurOptions& opts) {
  PointAnalysis a;
  a.g = g_bundle(label, params.q(), opts.series);
  a.variances = variances_closed_form(label, params, a.g);
  a.rhs = commutator_rhs(label, params);
  a.gur = gur_report(a.variances, a.rhs, opts);
  a.conditions = feasibility_conditions(label, params, a.g);
  a.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    a.min_ratio = std::min(a.min_ratio, a.gur[i].ratio);
    a.violated = a.violated || !a.gur[i].satisfied;
  }
  return a;
}

}  // namespace qbicoh
