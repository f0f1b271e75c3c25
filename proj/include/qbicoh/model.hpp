#pragma once

#include "qbicoh/qmath.hpp"

namespace qbicoh {

// Physical inputs in dimensionless code units (defaults m = omega = hbar = 1).
struct PhysicalInputs {
  double m = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  double theta = 0.0;  // noncommutativity, [x1, x2] = i theta
  QValue q{1.0};

  // Throws DomainError unless m, omega, hbar > 0 and theta >= 0.
  void validate() const;
};

// Oscillator constants of the noncommutative two-mode oscillator:
//
//   lambda_{1,2} = (m w sqrt(4 hbar^2 + m^2 w^2 theta^2) +- m^2 w^2 theta) / 2
//   K_1 = lambda_1 (4 + 2 lambda_1 theta / hbar^2)
//   K_2 = lambda_2 (4 - 2 lambda_2 theta / hbar^2)
//
// lambda_1 lambda_2 = hbar^2 m^2 w^2 and lambda_1 - lambda_2 = m^2 w^2 theta.
struct ModelParams {
  PhysicalInputs inputs;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double Lambda = 0.0;  // lambda1 + lambda2

  QValue q() const noexcept { return inputs.q; }
  double hbar() const noexcept { return inputs.hbar; }
  double m() const noexcept { return inputs.m; }
  double theta() const noexcept { return inputs.theta; }
};

// Throws InvariantError if a derived constant is not strictly positive.
ModelParams derive_params(const PhysicalInputs& inputs);

}  // namespace qbicoh
