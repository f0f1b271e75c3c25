#pragma once

// Two-mode q-deformed bi-coherent states
//
//   |J1,g1; J2,g2>_q = E_q^{-1/2} sum_{n1,n2} J1^{n1/2} J2^{n2/2}
//                      exp(-i (g1 [n1]_q + g2 [n2]_q)) / sqrt([n1]_q! [n2]_q!)
//                      |n1, n2>_q
//
// on a truncated Fock basis.

#include <cstddef>

#include "qbicoh/fock.hpp"
#include "qbicoh/label.hpp"
#include "qbicoh/model.hpp"
#include "qbicoh/qmath.hpp"

namespace qbicoh {

enum class PhaseConvention {
  // exp(-i (g1 [n1]_q + g2 [n2]_q)); the evolution law g -> g + lambda t / m
  // holds with this sign.
  Deformed,
  // exp(+i (g1 n1 + g2 n2)) with ordinary factorials, as the undeformed
  // bi-coherent state is usually printed. Only valid at q = 1.
  UndeformedPrinted,
};

struct StateVector {
  FockBasis basis{2};
  Vector amplitudes;
  double truncation_error = 0.0;  // upper bound on the neglected weight

  double norm() const { return amplitudes.norm(); }
};

struct StateOptions {
  double tol = 1e-14;  // neglected-weight budget
  std::size_t min_cutoff = 2;
  std::size_t max_cutoff = 192;
  PhaseConvention phase = PhaseConvention::Deformed;
};

// E_q(J1, J2) to within an absolute tail of tol. Throws DomainError when a
// J lies on or beyond the convergence radius.
double normalization_Eq(double J1, double J2, QValue q, double tol = 1e-13);

// Coherent state on a given basis. Throws CutoffError if the neglected
// weight exceeds tol.
StateVector build_coherent_vector(const CoherentLabel& label, QValue q,
                                  const FockBasis& basis,
                                  PhaseConvention phase = PhaseConvention::Deformed,
                                  double tol = 1e-14);

// Coherent state on the smallest basis meeting opts.tol, capped at
// opts.max_cutoff (CutoffError beyond that).
StateVector build_coherent_state(const CoherentLabel& label, QValue q,
                                 const StateOptions& opts = {});

// Smallest cutoff meeting the neglected-weight budget (may exceed the cap).
std::size_t required_cutoff(const CoherentLabel& label, QValue q, double tol,
                            std::size_t min_cutoff = 2);

// Temporal stability: exp(-i H_q t) maps gamma_i to gamma_i + lambda_i t / m.
CoherentLabel evolve(const CoherentLabel& label, double t, const ModelParams& params);

// <H_q> - (lambda1 J1 + lambda2 J2) / m in the coherent state, with
// H_q = (lambda1 A1^dag A1 + lambda2 A2^dag A2) / m as a matrix.
double action_identity_check(const CoherentLabel& label, const ModelParams& params,
                             const StateOptions& opts = {});

}  // namespace qbicoh
