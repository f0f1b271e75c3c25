#pragma once

// Closed-form moments, variances and uncertainty products of the canonical
// operators in a q-deformed bi-coherent state, built from the G functions.

#include <array>
#include <complex>

#include "qbicoh/fock.hpp"
#include "qbicoh/label.hpp"
#include "qbicoh/model.hpp"
#include "qbicoh/series.hpp"

namespace qbicoh {

// chi_i = (Delta X_i)^2, kappa_i = (Delta P_i)^2.
struct VarianceSet {
  double chi1 = 0.0, chi2 = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0;
};

inline constexpr double kNegativeVarianceSlack = 1e-10;

// Values in [-kNegativeVarianceSlack, 0) are clamped to 0 with a warning on
// std::clog; anything more negative throws InvariantError.
VarianceSet variances_closed_form(const CoherentLabel& label,
                                  const ModelParams& params, const GBundle& gb);
// Same formulas without the sign check; may return negative values when the
// G functions are not those of a physical state (paper-literal exponent).
VarianceSet variances_unchecked(const CoherentLabel& label,
                                const ModelParams& params, const GBundle& gb);

// 1/2 |<[O1, O2]>| for the four non-commuting pairs. Independent of the
// phases because <A_i^dag A_i> = J_i.
struct RhsBounds {
  double x1x2 = 0.0, x1p1 = 0.0, x2p2 = 0.0, p1p2 = 0.0;
  double operator[](CanonicalPair pair) const;
};

RhsBounds commutator_rhs(const CoherentLabel& label, const ModelParams& params);

// Signed <[O1, O2]> (purely imaginary), indexed like kAllPairs.
std::array<Complex, 6> commutator_means(const CoherentLabel& label,
                                        const ModelParams& params);

struct GurReport {
  CanonicalPair pair = CanonicalPair::X1X2;
  double lhs = 0.0;    // Delta O1 * Delta O2
  double rhs = 0.0;    // 1/2 |<[O1, O2]>|
  double ratio = 0.0;  // lhs / rhs; +inf if rhs = 0 < lhs; 1 if both vanish
  bool satisfied = true;   // lhs + tol * max(1, rhs) >= rhs
  bool saturated = false;  // |lhs - rhs| <= saturation_tol * rhs
};

struct GurOptions {
  double tol = 1e-9;
  double saturation_tol = 1e-6;
  SeriesOptions series;
};

// Six reports indexed like kAllPairs; the cross pairs X1P2 and X2P1 have
// rhs = 0.
std::array<GurReport, 6> gur_report(const VarianceSet& v, const RhsBounds& rhs,
                                    const GurOptions& opts = {});
std::array<GurReport, 6> gur_report(const CoherentLabel& label,
                                    const ModelParams& params,
                                    const GurOptions& opts = {});

// Signed values of the sufficient conditions p1..p4 (each one says a
// variance is at least its gamma = 0 value) and of the reduced conditions.
struct FeasibilityConditions {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;
  double reduced1 = 0.0;       // 4 J1 - Gc1^2 + Gs1^2
  double reduced2 = 0.0;       // 4 J2 - Gc2^2 + Gs2^2
  double reduced_cross = 0.0;  // 2 Gc+ - (Gc1 Gc2 + Gs1 Gs2)
  bool all_nonnegative() const;
};

FeasibilityConditions feasibility_conditions(const CoherentLabel& label,
                                             const ModelParams& params,
                                             const GBundle& gb);

// Closed-form first and second moments of X1, X2, P1, P2 from the series.
struct CanonicalMoments {
  std::array<Complex, 4> mean{};    // X1, X2, P1, P2
  std::array<Complex, 4> square{};  // <X1^2>, <X2^2>, <P1^2>, <P2^2>
};

CanonicalMoments closed_form_moments(const CoherentLabel& label,
                                     const ModelParams& params, const GBundle& gb);

// Everything a sweep row needs for one label.
struct PointAnalysis {
  GBundle g;
  VarianceSet variances;
  RhsBounds rhs;
  std::array<GurReport, 6> gur;
  FeasibilityConditions conditions;
  double min_ratio = 0.0;  // over the four non-commuting pairs
  bool violated = false;   // some non-commuting pair unsatisfied
};

PointAnalysis analyze_point(const CoherentLabel& label, const ModelParams& params,
                            const GurOptions& opts = {});

}  // namespace qbicoh
