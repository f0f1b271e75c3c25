#pragma once

#include <stdexcept>
#include <string>

namespace qbicoh {

// Input lies outside the domain of a formula (q out of range, J beyond the
// convergence radius, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A truncated Fock space is too small for the requested accuracy.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A derived quantity violated a structural invariant (negative variance,
// non-positive model constant, ...).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbicoh
