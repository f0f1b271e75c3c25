#pragma once

// Truncated two-mode q-Fock space and matrix representations of the deformed
// ladder operators and of the canonical operators built from them.
//
// Truncation is hard: raising past n = N-1 gives the zero vector, so every
// operator identity is only checked on the interior subspace n1, n2 <= N-2.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qbicoh/model.hpp"
#include "qbicoh/qmath.hpp"

namespace qbicoh {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTolerance = 1e-13;

// Two modes with n_i in 0..N-1, linear index k = n1 * N + n2.
class FockBasis {
 public:
  explicit FockBasis(std::size_t cutoff);

  std::size_t cutoff() const noexcept { return cutoff_; }
  std::size_t dim() const noexcept { return cutoff_ * cutoff_; }

  std::size_t index(std::size_t n1, std::size_t n2) const;
  std::pair<std::size_t, std::size_t> modes(std::size_t k) const;
  bool interior(std::size_t k) const;

  friend bool operator==(const FockBasis& a, const FockBasis& b) {
    return a.cutoff_ == b.cutoff_;
  }

 private:
  std::size_t cutoff_;
};

// Rejects N < 2 with DomainError.
FockBasis build_basis(std::size_t cutoff);

// Complex matrix on a truncated basis. Storage is sparse: every operator in
// this model couples a basis state to at most a handful of neighbours.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  // With hermitian_hint set, throws InvariantError unless
  // max |M - M^dagger| < kHermitianTolerance.
  explicit OperatorMatrix(SparseMatrix m, bool hermitian_hint = false);

  const SparseMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  bool hermitian_hint() const noexcept { return hermitian_; }

  OperatorMatrix adjoint() const;
  Vector apply(const Vector& v) const;
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }

  double max_abs() const;
  double hermiticity_defect() const;
  // max |M_kl| over k, l both in the interior subspace.
  double interior_max_abs(const FockBasis& basis) const;
  Complex entry(std::size_t row, std::size_t col) const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);
  friend OperatorMatrix operator*(double s, const OperatorMatrix& a);

 private:
  SparseMatrix m_;
  bool hermitian_ = false;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix identity_operator(const FockBasis& basis);

struct LadderSet {
  OperatorMatrix A1, A2;    // lowering
  OperatorMatrix A1d, A2d;  // raising, built entry by entry (not adjointed)
};

// A_i |..n_i..> = sqrt([n_i]_q) |..n_i - 1..>,
// A_i^dagger |..n_i..> = sqrt([n_i + 1]_q) |..n_i + 1..>.
LadderSet ladder_matrices(const FockBasis& basis, QValue q);

struct CanonicalSet {
  OperatorMatrix X1, X2, P1, P2;
};

// X/P from the inverted ladder map; all four are Hermitian.
CanonicalSet canonical_matrices(const ModelParams& params, const LadderSet& ladders);

// Number operators A_i^dagger A_i and the shifted Hamiltonian
// H_q = (lambda1 A1^dagger A1 + lambda2 A2^dagger A2) / m.
OperatorMatrix number_operator(const LadderSet& ladders, int mode);
OperatorMatrix hamiltonian(const ModelParams& params, const LadderSet& ladders);

struct AlgebraResidual {
  std::array<double, 2> same_mode{};  // A_i A_i^dag - q^2 A_i^dag A_i - 1
  std::array<double, 2> cross_mode{};  // A_1 A_2^dag - A_2^dag A_1 and 1<->2
  double annihilators = 0.0;           // [A_1, A_2]
  double max() const;
};

AlgebraResidual deformed_algebra_residual(const LadderSet& ladders, QValue q,
                                          const FockBasis& basis);

enum class CanonicalPair { X1X2, X1P1, X2P2, P1P2, X1P2, X2P1 };
inline constexpr std::array<CanonicalPair, 6> kAllPairs = {
    CanonicalPair::X1X2, CanonicalPair::X1P1, CanonicalPair::X2P2,
    CanonicalPair::P1P2, CanonicalPair::X1P2, CanonicalPair::X2P1};
std::string to_string(CanonicalPair pair);

// Matrix commutator [O1, O2] for the pair.
OperatorMatrix pair_commutator(const CanonicalSet& c, CanonicalPair pair);

// Interior residuals of the deformed commutators against their right-hand
// sides in terms of K_i A_i^dag A_i, plus the quadratic expansions of
// K_1 A_1^dag A_1 and K_2 A_2^dag A_2 in canonical variables.
struct DynamicalCommutatorReport {
  std::array<double, 6> pair_residual{};  // indexed like kAllPairs
  double k1_expansion = 0.0;
  double k2_expansion = 0.0;
  double max() const;
};

DynamicalCommutatorReport verify_dynamical_commutators(const ModelParams& params,
                                                       const FockBasis& basis);

// Expected value of both sides of the solved (quadratic) commutator forms in
// a given state. Diagnostic only; nothing is asserted.
struct SolvedFormComparison {
  std::string name;  // "x1x2", "x1p1", "x2p2", "p1p2"
  Complex lhs;       // <[O1, O2]>
  Complex rhs;       // <printed right-hand side>
  Complex discrepancy;
  std::vector<std::pair<std::string, Complex>> rhs_terms;
};

std::vector<SolvedFormComparison> solved_commutator_forms(
    const ModelParams& params, const CanonicalSet& canonical,
    const Vector& state);

Complex expectation_value(const Vector& state, const OperatorMatrix& op);

}  // namespace qbicoh
