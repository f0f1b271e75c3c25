#pragma once

namespace qbicoh {

// Label (J1, gamma1; J2, gamma2) of a two-mode bi-coherent state. The radius
// condition J_i < 1/(1-q^2) depends on q and is checked where a state or
// series is actually built.
struct CoherentLabel {
  double J1 = 0.0;
  double gamma1 = 0.0;
  double J2 = 0.0;
  double gamma2 = 0.0;
};

}  // namespace qbicoh
