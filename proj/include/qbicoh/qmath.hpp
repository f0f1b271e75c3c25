#pragma once

// q-deformed combinatorics shared by every series evaluator.
//
//   [n]_q  = (1 - q^{2n}) / (1 - q^2)      ([n]_1 = n)
//   [n]_q! = [1]_q [2]_q ... [n]_q
//
// The series  sum_n J^n / [n]_q!  converges for J < 1/(1-q^2).

#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

namespace qbicoh {

// Deformation parameter, 0 < q <= 1.
class QValue {
 public:
  explicit QValue(double q);

  double value() const noexcept { return q_; }
  bool classical() const noexcept { return q_ == 1.0; }
  double squared() const noexcept { return q_ * q_; }

  friend bool operator==(QValue a, QValue b) noexcept { return a.q_ == b.q_; }

 private:
  double q_;
};

double q_int(std::size_t n, QValue q);

// Throws std::range_error if the product overflows a double.
double q_factorial(std::size_t n, QValue q);

// 1/(1-q^2), or +infinity at q = 1.
double q_radius(QValue q);

// Throws DomainError unless 0 <= J < q_radius(q).
void require_inside_radius(double J, QValue q, const char* what = "J");

// Prefix tables of [n]_q and [n]_q! for n = 0..size-1. Immutable once built.
class QFactorialTable {
 public:
  QFactorialTable(QValue q, std::size_t size);

  QValue q() const noexcept { return q_; }
  std::size_t size() const noexcept { return ints_.size(); }
  double q_int(std::size_t n) const { return ints_.at(n); }
  double factorial(std::size_t n) const { return facts_.at(n); }

 private:
  QValue q_;
  std::vector<double> ints_;
  std::vector<double> facts_;
};

// Shared memoized table holding at least `size` entries. Thread safe; the
// returned table is never mutated.
std::shared_ptr<const QFactorialTable> cached_factorials(QValue q,
                                                         std::size_t size);

// Terms J^n / [n]_q! for n = 0..count-1, built by the recurrence
// t_n = t_{n-1} J / [n]_q.
std::vector<double> series_terms(double J, QValue q, std::size_t count);

// Rigorous upper bound on  sum_{n >= N} J^n / [n]_q!.
double tail_bound_1d(double J, QValue q, std::size_t N);

// Rigorous upper bound on the part of
//   sum_{n1,n2} J1^{n1} J2^{n2} / ([n1]_q! [n2]_q!)
// with max(n1, n2) >= N, i.e. everything outside the N x N square.
double tail_bound(double J1, double J2, QValue q, std::size_t N);

// Smallest N (>= min_cutoff) whose tail_bound is <= tol, or max_cutoff + 1
// if none up to max_cutoff qualifies.
std::size_t cutoff_for_tail(double J1, double J2, QValue q, double tol,
                            std::size_t min_cutoff = 1,
                            std::size_t max_cutoff = 1u << 16);

}  // namespace qbicoh
