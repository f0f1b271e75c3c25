#include "qbicoh/model.hpp"

#include <cmath>
#include <string>

#include "qbicoh/errors.hpp"

namespace qbicoh {

void PhysicalInputs::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("m must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("omega must be positive");
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw DomainError("hbar must be positive");
  }
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("theta must be non-negative");
  }
}

ModelParams derive_params(const PhysicalInputs& inputs) {
  inputs.validate();
  const double mw = inputs.m * inputs.omega;
  const double hbar2 = inputs.hbar * inputs.hbar;
  const double theta = inputs.theta;

  ModelParams p;
  p.inputs = inputs;
  const double root = mw * std::sqrt(4.0 * hbar2 + mw * mw * theta * theta);
  p.lambda1 = 0.5 * (root + mw * mw * theta);
  // lambda2 through the product identity; the direct difference cancels
  // catastrophically once m w theta >> hbar.
  p.lambda2 = theta == 0.0 ? p.lambda1 : hbar2 * mw * mw / p.lambda1;
  p.K1 = p.lambda1 * (4.0 + 2.0 * p.lambda1 * theta / hbar2);
  p.K2 = p.lambda2 * (4.0 - 2.0 * p.lambda2 * theta / hbar2);
  p.Lambda = p.lambda1 + p.lambda2;

  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvariantError(std::string(name) + " = " + std::to_string(v) +
                           " is not positive");
    }
  };
  require_positive(p.lambda1, "lambda1");
  require_positive(p.lambda2, "lambda2");
  require_positive(p.K1, "K1");
  require_positive(p.K2, "K2");
  return p;
}

}  // namespace qbicoh
