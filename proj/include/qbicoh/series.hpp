#pragma once

// Phase-weighted double series over the two-mode q-Fock basis:
//
//   F(g1, g2) = sum_{n1,n2} J1^{n1} J2^{n2} exp(i g1 e(n1) + i g2 e(n2))
//                           / ([n1]_q! [n2]_q!)
//
// and the G functions built from it. The exponent e(n) is selectable:
//   SpectralGap  : e(n) = q^{2n} = [n+1]_q - [n]_q
//   PaperLiteral : e(n) = q^{2 [n]_q}
// Only SpectralGap reproduces the ladder-operator expectations of the
// coherent state; PaperLiteral is kept for comparison.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbicoh/label.hpp"
#include "qbicoh/qmath.hpp"

namespace qbicoh {

using Complex = std::complex<double>;

enum class ExponentConvention { SpectralGap, PaperLiteral };

std::string to_string(ExponentConvention c);
// Accepts "spectral-gap" and "paper-literal"; throws std::invalid_argument.
ExponentConvention parse_convention(std::string_view name);

struct SeriesOptions {
  ExponentConvention convention = ExponentConvention::SpectralGap;
  double tol = 1e-13;                 // absolute bound on the neglected tail
  std::size_t max_cutoff = 1u << 14;  // per mode
};

double phase_exponent(std::size_t n, QValue q, ExponentConvention c);

// sum_{n1 < w1.size(), n2 < w2.size()} w1[n1] w2[n2], accumulated along
// anti-diagonals of increasing n1 + n2 with Neumaier compensation.
Complex compensated_double_sum(std::span<const Complex> w1,
                               std::span<const Complex> w2);

// Precomputes the truncated term tables for one (J1, J2, q) and evaluates
// F for any pair of angles. The cutoff is the smallest square whose
// neglected tail is below opts.tol.
class SeriesEvaluator {
 public:
  SeriesEvaluator(double J1, double J2, QValue q, const SeriesOptions& opts = {});

  double J1() const noexcept { return J1_; }
  double J2() const noexcept { return J2_; }
  QValue q() const noexcept { return q_; }
  ExponentConvention convention() const noexcept { return convention_; }
  std::size_t cutoff() const noexcept { return terms1_.size(); }
  double tail() const noexcept { return tail_; }

  // E_q(J1, J2) = F(0, 0).
  double E() const noexcept { return E_; }
  Complex F(double gamma1, double gamma2) const;

 private:
  double J1_, J2_;
  QValue q_;
  ExponentConvention convention_;
  std::vector<double> terms1_, terms2_;
  std::vector<double> exponents_;
  double tail_ = 0.0;
  double E_ = 0.0;
};

// F_q(J1, J2, gamma) with the phase on `mode` (1 or 2).
Complex F_q(double J1, double J2, double gamma, int mode, QValue q,
            const SeriesOptions& opts = {});
Complex F_q_joint(double J1, double J2, double gamma1, double gamma2, QValue q,
                  const SeriesOptions& opts = {});

// G_s values are purely imaginary and kept complex, as defined.
struct GBundle {
  double Gc1 = 0.0, Gc2 = 0.0;
  Complex Gs1, Gs2;
  double Gq1 = 0.0, Gq2 = 0.0;
  double Gc_plus = 0.0, Gc_minus = 0.0;
  Complex Gs_plus, Gs_minus;

  // Raw series values the G functions were assembled from.
  double E = 1.0;
  Complex F1, F2;    // F(g1, 0), F(0, g2)
  Complex Fq1, Fq2;  // F((1+q^2) g1, 0), F(0, (1+q^2) g2)
  Complex Fpp, Fpm;  // F(g1, g2), F(g1, -g2)
  std::size_t cutoff = 0;
  double tail = 0.0;
};

// Throws InvariantError if a range bound (|Gc_i| <= 2 sqrt(J_i), ...) fails.
GBundle g_bundle(const CoherentLabel& label, QValue q,
                 const SeriesOptions& opts = {});
GBundle g_bundle(const CoherentLabel& label, const SeriesEvaluator& series);

}  // namespace qbicoh
