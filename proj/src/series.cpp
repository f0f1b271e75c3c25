#include "qbicoh/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbicoh/errors.hpp"

namespace qbicoh {

namespace {

// Neumaier (improved Kahan) accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

std::string to_string(ExponentConvention c) {
  return c == ExponentConvention::SpectralGap ? "spectral-gap" : "paper-literal";
}

ExponentConvention parse_convention(std::string_view name) {
  if (name == "spectral-gap") return ExponentConvention::SpectralGap;
  if (name == "paper-literal") return ExponentConvention::PaperLiteral;
  throw std::invalid_argument("unknown exponent convention '" +
                              std::string(name) + "'");
}

double phase_exponent(std::size_t n, QValue q, ExponentConvention c) {
  const double q2 = q.squared();
  if (c == ExponentConvention::SpectralGap) {
    return std::pow(q2, static_cast<double>(n));
  }
  return std::pow(q2, q_int(n, q));
}

Complex compensated_double_sum(std::span<const Complex> w1,
                               std::span<const Complex> w2) {
  CompensatedSum re, im;
  const std::size_t n1_max = w1.size();
  const std::size_t n2_max = w2.size();
  if (n1_max == 0 || n2_max == 0) return {};
  for (std::size_t d = 0; d + 2 <= n1_max + n2_max; ++d) {
    const std::size_t lo = d + 1 > n2_max ? d + 1 - n2_max : 0;
    const std::size_t hi = std::min(d, n1_max - 1);
    for (std::size_t n1 = lo; n1 <= hi; ++n1) {
      const Complex term = w1[n1] * w2[d - n1];
      re.add(term.real());
      im.add(term.imag());
    }
  }
  return {re.value(), im.value()};
}

SeriesEvaluator::SeriesEvaluator(double J1, double J2, QValue q,
                                 const SeriesOptions& opts)
    : J1_(J1), J2_(J2), q_(q), convention_(opts.convention) {
  require_inside_radius(J1, q, "J1");
  require_inside_radius(J2, q, "J2");
  if (!(opts.tol > 0.0)) throw DomainError("series tolerance must be positive");
  const std::size_t N = cutoff_for_tail(J1, J2, q, opts.tol, 1, opts.max_cutoff);
  if (N > opts.max_cutoff) {
    throw CutoffError("series for J1 = " + std::to_string(J1) + ", J2 = " +
                      std::to_string(J2) + " needs more than " +
                      std::to_string(opts.max_cutoff) + " terms per mode");
  }
  terms1_ = series_terms(J1, q, N);
  terms2_ = series_terms(J2, q, N);
  tail_ = tail_bound(J1, J2, q, N);
  exponents_.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    exponents_[n] = phase_exponent(n, q, convention_);
  }
  E_ = F(0.0, 0.0).real();
}

Complex SeriesEvaluator::F(double gamma1, double gamma2) const {
  const std::size_t N = cutoff();
  std::vector<Complex> w1(N), w2(N);
  for (std::size_t n = 0; n < N; ++n) {
    w1[n] = terms1_[n] * std::polar(1.0, gamma1 * exponents_[n]);
    w2[n] = terms2_[n] * std::polar(1.0, gamma2 * exponents_[n]);
  }
  return compensated_double_sum(w1, w2);
}

Complex F_q(double J1, double J2, double gamma, int mode, QValue q,
            const SeriesOptions& opts) {
  const SeriesEvaluator s(J1, J2, q, opts);
  if (mode == 1) return s.F(gamma, 0.0);
  if (mode == 2) return s.F(0.0, gamma);
  throw std::invalid_argument("F_q mode must be 1 or 2");
}

Complex F_q_joint(double J1, double J2, double gamma1, double gamma2, QValue q,
                  const SeriesOptions& opts) {
  return SeriesEvaluator(J1, J2, q, opts).F(gamma1, gamma2);
}

GBundle g_bundle(const CoherentLabel& label, QValue q, const SeriesOptions& opts) {
  return g_bundle(label, SeriesEvaluator(label.J1, label.J2, q, opts));
}

GBundle g_bundle(const CoherentLabel& label, const SeriesEvaluator& s) {
  if (label.J1 != s.J1() || label.J2 != s.J2()) {
    throw std::invalid_argument("series evaluator built for a different label");
  }
  const double g1 = label.gamma1;
  const double g2 = label.gamma2;
  const double scale = 1.0 + s.q().squared();

  GBundle b;
  b.E = s.E();
  b.cutoff = s.cutoff();
  b.tail = s.tail();
  b.F1 = s.F(g1, 0.0);
  b.F2 = s.F(0.0, g2);
  b.Fq1 = s.F(scale * g1, 0.0);
  b.Fq2 = s.F(0.0, scale * g2);
  b.Fpp = s.F(g1, g2);
  b.Fpm = s.F(g1, -g2);

  // F(-g) = conj(F(g)) term by term, so F(g) + F(-g) = 2 Re F(g) and
  // F(g) - F(-g) = 2i Im F(g).
  const double r1 = std::sqrt(label.J1);
  const double r2 = std::sqrt(label.J2);
  const double r12 = std::sqrt(label.J1 * label.J2);
  const Complex I(0.0, 1.0);
  b.Gc1 = 2.0 * r1 * b.F1.real() / b.E;
  b.Gc2 = 2.0 * r2 * b.F2.real() / b.E;
  b.Gs1 = 2.0 * I * r1 * b.F1.imag() / b.E;
  b.Gs2 = 2.0 * I * r2 * b.F2.imag() / b.E;
  b.Gq1 = 2.0 * label.J1 * b.Fq1.real() / b.E;
  b.Gq2 = 2.0 * label.J2 * b.Fq2.real() / b.E;
  b.Gc_plus = 2.0 * r12 * b.Fpp.real() / b.E;
  b.Gs_plus = 2.0 * I * r12 * b.Fpp.imag() / b.E;
  b.Gc_minus = 2.0 * r12 * b.Fpm.real() / b.E;
  b.Gs_minus = 2.0 * I * r12 * b.Fpm.imag() / b.E;

  auto check = [](double value, double bound, const char* name) {
    if (std::abs(value) > bound * (1.0 + 1e-12) + 1e-15) {
      throw InvariantError(std::string(name) + " exceeds its range bound");
    }
  };
  check(b.Gc1, 2.0 * r1, "Gc1");
  check(b.Gc2, 2.0 * r2, "Gc2");
  check(b.Gs1.imag(), 2.0 * r1, "Gs1");
  check(b.Gs2.imag(), 2.0 * r2, "Gs2");
  check(b.Gq1, 2.0 * label.J1, "Gq1");
  check(b.Gq2, 2.0 * label.J2, "Gq2");
  check(b.Gc_plus, 2.0 * r12, "Gc_plus");
  check(b.Gc_minus, 2.0 * r12, "Gc_minus");
  return b;
}

}  // namespace qbicoh
