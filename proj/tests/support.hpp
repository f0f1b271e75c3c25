#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "qbicoh/label.hpp"
#include "qbicoh/model.hpp"
#include "qbicoh/qmath.hpp"

namespace qbicoh::test {

inline ModelParams params(double q, double theta = 0.0, double hbar = 1.0,
                          double m = 1.0, double omega = 1.0) {
  PhysicalInputs in;
  in.q = QValue(q);
  in.theta = theta;
  in.hbar = hbar;
  in.m = m;
  in.omega = omega;
  return derive_params(in);
}

// J kept below `fraction` of the radius (and below jmax) so states fit in a
// few hundred Fock levels per mode.
inline CoherentLabel random_label(std::mt19937_64& rng, QValue q,
                                  double fraction = 0.8, double jmax = 3.0) {
  const double top = std::min(jmax, fraction * q_radius(q));
  std::uniform_real_distribution<double> J(0.0, top);
  std::uniform_real_distribution<double> g(-M_PI, M_PI);
  return {J(rng), g(rng), J(rng), g(rng)};
}

}  // namespace qbicoh::test
