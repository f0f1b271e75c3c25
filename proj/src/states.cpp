#include "qbicoh/states.hpp"

#include <cmath>
#include <string>

#include "qbicoh/errors.hpp"
#include "qbicoh/series.hpp"

namespace qbicoh {

double normalization_Eq(double J1, double J2, QValue q, double tol) {
  SeriesOptions opts;
  opts.tol = tol;
  return SeriesEvaluator(J1, J2, q, opts).E();
}

std::size_t required_cutoff(const CoherentLabel& label, QValue q, double tol,
                            std::size_t min_cutoff) {
  // Absolute tail <= tol implies neglected weight tail / E_q <= tol since
  // E_q >= 1.
  return cutoff_for_tail(label.J1, label.J2, q, tol, std::max<std::size_t>(min_cutoff, 2));
}

StateVector build_coherent_vector(const CoherentLabel& label, QValue q,
                                  const FockBasis& basis, PhaseConvention phase,
                                  double tol) {
  require_inside_radius(label.J1, q, "J1");
  require_inside_radius(label.J2, q, "J2");
  if (phase == PhaseConvention::UndeformedPrinted && !q.classical()) {
    throw DomainError("the undeformed phase convention requires q = 1");
  }
  const std::size_t N = basis.cutoff();

  // sqrt(J^n / [n]_q!) and the per-mode phase angle.
  auto mode_amplitudes = [&](double J, double gamma) {
    Vector a(static_cast<Eigen::Index>(N));
    double mag = 1.0;
    for (std::size_t n = 0; n < N; ++n) {
      if (n > 0) mag *= std::sqrt(J / q_int(n, q));
      const double angle = phase == PhaseConvention::Deformed
                               ? -gamma * q_int(n, q)
                               : gamma * static_cast<double>(n);
      a[static_cast<Eigen::Index>(n)] = std::polar(mag, angle);
    }
    return a;
  };
  const Vector a1 = mode_amplitudes(label.J1, label.gamma1);
  const Vector a2 = mode_amplitudes(label.J2, label.gamma2);

  StateVector s;
  s.basis = basis;
  s.amplitudes.resize(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t n1 = 0; n1 < N; ++n1) {
    for (std::size_t n2 = 0; n2 < N; ++n2) {
      s.amplitudes[static_cast<Eigen::Index>(basis.index(n1, n2))] =
          a1[static_cast<Eigen::Index>(n1)] * a2[static_cast<Eigen::Index>(n2)];
    }
  }
  const double kept = s.amplitudes.squaredNorm();  // truncated E_q
  s.amplitudes /= std::sqrt(kept);
  s.truncation_error = tail_bound(label.J1, label.J2, q, N) / kept;
  if (s.truncation_error > tol) {
    throw CutoffError("cutoff " + std::to_string(N) + " leaves weight " +
                      std::to_string(s.truncation_error) + " > " +
                      std::to_string(tol));
  }
  return s;
}

StateVector build_coherent_state(const CoherentLabel& label, QValue q,
                                 const StateOptions& opts) {
  const std::size_t N = required_cutoff(label, q, opts.tol, opts.min_cutoff);
  if (N > opts.max_cutoff) {
    throw CutoffError("label needs cutoff " + std::to_string(N) +
                      " above the configured maximum " +
                      std::to_string(opts.max_cutoff));
  }
  return build_coherent_vector(label, q, FockBasis(N), opts.phase, opts.tol);
}

CoherentLabel evolve(const CoherentLabel& label, double t, const ModelParams& params) {
  CoherentLabel out = label;
  out.gamma1 += params.lambda1 * t / params.m();
  out.gamma2 += params.lambda2 * t / params.m();
  return out;
}

double action_identity_check(const CoherentLabel& label, const ModelParams& params,
                             const StateOptions& opts) {
  const StateVector s = build_coherent_state(label, params.q(), opts);
  const LadderSet ladders = ladder_matrices(s.basis, params.q());
  const Complex h = expectation_value(s.amplitudes, hamiltonian(params, ladders));
  return h.real() - (params.lambda1 * label.J1 + params.lambda2 * label.J2) / params.m();
}

}  // namespace qbicoh
