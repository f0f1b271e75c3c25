#include "qbicoh/qmath.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "qbicoh/errors.hpp"

namespace qbicoh {

QValue::QValue(double q) : q_(q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("q must lie in (0, 1], got " + std::to_string(q));
  }
}

double q_int(std::size_t n, QValue q) {
  if (q.classical()) return static_cast<double>(n);
  if (n == 0) return 0.0;
  // expm1 keeps full relative precision as q -> 1.
  const double two_log_q = 2.0 * std::log(q.value());
  return std::expm1(static_cast<double>(n) * two_log_q) / std::expm1(two_log_q);
}

double q_factorial(std::size_t n, QValue q) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) {
    f *= q_int(k, q);
    if (!std::isfinite(f)) {
      throw std::range_error("q_factorial overflow at n = " + std::to_string(n));
    }
  }
  return f;
}

double q_radius(QValue q) {
  if (q.classical()) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - q.squared());
}

void require_inside_radius(double J, QValue q, const char* what) {
  if (!(J >= 0.0) || !(J < q_radius(q))) {
    throw DomainError(std::string(what) + " = " + std::to_string(J) +
                      " outside [0, 1/(1-q^2)) for q = " +
                      std::to_string(q.value()));
  }
}

QFactorialTable::QFactorialTable(QValue q, std::size_t size) : q_(q) {
  ints_.reserve(size);
  facts_.reserve(size);
  double f = 1.0;
  for (std::size_t n = 0; n < size; ++n) {
    const double qi = qbicoh::q_int(n, q);
    if (n > 0) f *= qi;
    ints_.push_back(qi);
    facts_.push_back(f);  // may become +inf at q = 1 for n > 170
  }
}

std::shared_ptr<const QFactorialTable> cached_factorials(QValue q,
                                                         std::size_t size) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const QFactorialTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[q.value()];
  if (!slot || slot->size() < size) {
    slot = std::make_shared<const QFactorialTable>(q, size);
  }
  return slot;
}

std::vector<double> series_terms(double J, QValue q, std::size_t count) {
  std::vector<double> t;
  t.reserve(count);
  double term = 1.0;
  for (std::size_t n = 0; n < count; ++n) {
    if (n > 0) term *= J / q_int(n, q);
    t.push_back(term);
  }
  return t;
}

namespace {

// Bound on sum_{n >= N} t_n given t_N. Sums explicitly until the term ratio
// J/[n+1] drops below a threshold strictly under 1, then closes with a
// geometric series (the ratio is non-increasing in n).
double tail_from(double J, QValue q, std::size_t N, double t_N) {
  if (J == 0.0) return N == 0 ? 1.0 : 0.0;
  const double limit_ratio = q.classical() ? 0.0 : J * (1.0 - q.squared());
  const double accept = 0.5 * (1.0 + limit_ratio);
  double sum = 0.0;
  double t = t_N;
  for (std::size_t n = N;; ++n) {
    if (t == 0.0) return sum;
    const double ratio = J / q_int(n + 1, q);
    if (ratio <= accept) return sum + t / (1.0 - ratio);
    sum += t;
    t *= ratio;
  }
}

struct Partial {
  double prefix;  // sum_{n < N} t_n
  double tail;    // bound on sum_{n >= N} t_n
};

Partial partial_1d(double J, QValue q, std::size_t N) {
  double prefix = 0.0;
  double t = 1.0;
  for (std::size_t n = 0; n < N; ++n) {
    if (n > 0) t *= J / q_int(n, q);
    prefix += t;
  }
  const double t_N = N == 0 ? 1.0 : t * J / q_int(N, q);
  return {prefix, tail_from(J, q, N, t_N)};
}

}  // namespace

double tail_bound_1d(double J, QValue q, std::size_t N) {
  require_inside_radius(J, q);
  return partial_1d(J, q, N).tail;
}

double tail_bound(double J1, double J2, QValue q, std::size_t N) {
  require_inside_radius(J1, q, "J1");
  require_inside_radius(J2, q, "J2");
  const Partial a = partial_1d(J1, q, N);
  const Partial b = partial_1d(J2, q, N);
  // (Pa + Ta)(Pb + Tb) - Pa Pb, expanded to avoid cancellation.
  return a.tail * b.prefix + a.prefix * b.tail + a.tail * b.tail;
}

std::size_t cutoff_for_tail(double J1, double J2, QValue q, double tol,
                            std::size_t min_cutoff, std::size_t max_cutoff) {
  require_inside_radius(J1, q, "J1");
  require_inside_radius(J2, q, "J2");
  if (!(tol > 0.0)) throw DomainError("tail tolerance must be positive");
  // Running prefix sums and N-th terms so each candidate costs O(1) plus the
  // short explicit walk inside tail_from.
  double p1 = 0.0, p2 = 0.0, t1 = 1.0, t2 = 1.0;
  for (std::size_t N = 1; N <= max_cutoff; ++N) {
    p1 += t1;
    p2 += t2;
    t1 *= J1 / q_int(N, q);
    t2 *= J2 / q_int(N, q);
    if (N < min_cutoff) continue;
    const double r1 = tail_from(J1, q, N, t1);
    const double r2 = tail_from(J2, q, N, t2);
    if (r1 * p2 + p1 * r2 + r1 * r2 <= tol) return N;
  }
  return max_cutoff + 1;
}

}  // namespace qbicoh
