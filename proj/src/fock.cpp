#include "qbicoh/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qbicoh/errors.hpp"

namespace qbicoh {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("operator dimension mismatch: " +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
  }
}

double max_abs_of(const SparseMatrix& m) {
  double r = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      r = std::max(r, std::abs(it.value()));
    }
  }
  return r;
}

}  // namespace

FockBasis::FockBasis(std::size_t cutoff) : cutoff_(cutoff) {
  if (cutoff < 2) {
    throw DomainError("Fock cutoff must be at least 2, got " +
                      std::to_string(cutoff));
  }
}

std::size_t FockBasis::index(std::size_t n1, std::size_t n2) const {
  if (n1 >= cutoff_ || n2 >= cutoff_) throw std::out_of_range("Fock index");
  return n1 * cutoff_ + n2;
}

std::pair<std::size_t, std::size_t> FockBasis::modes(std::size_t k) const {
  if (k >= dim()) throw std::out_of_range("Fock linear index");
  return {k / cutoff_, k % cutoff_};
}

bool FockBasis::interior(std::size_t k) const {
  const auto [n1, n2] = modes(k);
  return n1 + 2 <= cutoff_ && n2 + 2 <= cutoff_;
}

FockBasis build_basis(std::size_t cutoff) { return FockBasis(cutoff); }

OperatorMatrix::OperatorMatrix(SparseMatrix m, bool hermitian_hint)
    : m_(std::move(m)), hermitian_(hermitian_hint) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("operator not square");
  m_.makeCompressed();
  if (hermitian_) {
    const double defect = hermiticity_defect();
    if (!(defect < kHermitianTolerance)) {
      throw InvariantError("matrix tagged Hermitian has defect " +
                           std::to_string(defect));
    }
  }
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(SparseMatrix(m_.adjoint()), hermitian_);
}

Vector OperatorMatrix::apply(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != dim()) {
    throw std::invalid_argument("vector/operator dimension mismatch");
  }
  return m_ * v;
}

double OperatorMatrix::max_abs() const { return max_abs_of(m_); }

double OperatorMatrix::hermiticity_defect() const {
  return max_abs_of(SparseMatrix(m_ - SparseMatrix(m_.adjoint())));
}

double OperatorMatrix::interior_max_abs(const FockBasis& basis) const {
  if (basis.dim() != dim()) throw std::invalid_argument("basis/operator mismatch");
  double r = 0.0;
  for (int col = 0; col < m_.outerSize(); ++col) {
    if (!basis.interior(static_cast<std::size_t>(col))) continue;
    for (SparseMatrix::InnerIterator it(m_, col); it; ++it) {
      if (basis.interior(static_cast<std::size_t>(it.row()))) {
        r = std::max(r, std::abs(it.value()));
      }
    }
  }
  return r;
}

Complex OperatorMatrix::entry(std::size_t row, std::size_t col) const {
  return m_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b);
  OperatorMatrix r;
  r.m_ = a.m_ + b.m_;
  r.hermitian_ = a.hermitian_ && b.hermitian_;
  return r;
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b);
  OperatorMatrix r;
  r.m_ = a.m_ - b.m_;
  r.hermitian_ = a.hermitian_ && b.hermitian_;
  return r;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b);
  OperatorMatrix r;
  r.m_ = (a.m_ * b.m_).pruned();
  return r;
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
  OperatorMatrix r;
  r.m_ = s * a.m_;
  r.hermitian_ = a.hermitian_ && s.imag() == 0.0;
  return r;
}

OperatorMatrix operator*(double s, const OperatorMatrix& a) {
  return Complex(s, 0.0) * a;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

OperatorMatrix identity_operator(const FockBasis& basis) {
  SparseMatrix id(static_cast<Eigen::Index>(basis.dim()),
                  static_cast<Eigen::Index>(basis.dim()));
  id.setIdentity();
  return OperatorMatrix(std::move(id), true);
}

LadderSet ladder_matrices(const FockBasis& basis, QValue q) {
  const std::size_t N = basis.cutoff();
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  std::vector<double> amp(N + 1);
  for (std::size_t n = 0; n <= N; ++n) amp[n] = std::sqrt(q_int(n, q));

  std::vector<Triplet> low1, low2, up1, up2;
  for (std::size_t n1 = 0; n1 < N; ++n1) {
    for (std::size_t n2 = 0; n2 < N; ++n2) {
      const auto k = static_cast<Eigen::Index>(basis.index(n1, n2));
      if (n1 > 0) {
        low1.emplace_back(static_cast<Eigen::Index>(basis.index(n1 - 1, n2)), k, amp[n1]);
      }
      if (n2 > 0) {
        low2.emplace_back(static_cast<Eigen::Index>(basis.index(n1, n2 - 1)), k, amp[n2]);
      }
      if (n1 + 1 < N) {
        up1.emplace_back(static_cast<Eigen::Index>(basis.index(n1 + 1, n2)), k, amp[n1 + 1]);
      }
      if (n2 + 1 < N) {
        up2.emplace_back(static_cast<Eigen::Index>(basis.index(n1, n2 + 1)), k, amp[n2 + 1]);
      }
    }
  }
  auto build = [dim](const std::vector<Triplet>& t) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return OperatorMatrix(std::move(m));
  };
  return {build(low1), build(low2), build(up1), build(up2)};
}

CanonicalSet canonical_matrices(const ModelParams& p, const LadderSet& l) {
  require_same_dim(l.A1, l.A2);
  require_same_dim(l.A1, l.A1d);
  require_same_dim(l.A1, l.A2d);
  const Complex I(0.0, 1.0);
  const double s1 = std::sqrt(p.K1) / (2.0 * p.Lambda);
  const double s2 = std::sqrt(p.K2) / (2.0 * p.Lambda);
  const double hbar = p.hbar();

  const OperatorMatrix plus1 = l.A1 + l.A1d;
  const OperatorMatrix plus2 = l.A2 + l.A2d;
  const OperatorMatrix minus1 = l.A1 - l.A1d;
  const OperatorMatrix minus2 = l.A2 - l.A2d;

  auto hermitian = [](const OperatorMatrix& m) {
    return OperatorMatrix(m.matrix(), true);
  };
  CanonicalSet c;
  c.X1 = hermitian(-hbar * s1 * plus1 + hbar * s2 * plus2);
  c.X2 = hermitian(I * hbar * s1 * minus1 + I * hbar * s2 * minus2);
  c.P1 = hermitian(I * p.lambda2 * s1 * minus1 - I * p.lambda1 * s2 * minus2);
  c.P2 = hermitian(p.lambda2 * s1 * plus1 + p.lambda1 * s2 * plus2);
  return c;
}

OperatorMatrix number_operator(const LadderSet& ladders, int mode) {
  if (mode == 1) return ladders.A1d * ladders.A1;
  if (mode == 2) return ladders.A2d * ladders.A2;
  throw std::invalid_argument("mode must be 1 or 2");
}

OperatorMatrix hamiltonian(const ModelParams& p, const LadderSet& ladders) {
  const OperatorMatrix h = (p.lambda1 / p.m()) * number_operator(ladders, 1) +
                           (p.lambda2 / p.m()) * number_operator(ladders, 2);
  return OperatorMatrix(h.matrix(), true);
}

double AlgebraResidual::max() const {
  return std::max({same_mode[0], same_mode[1], cross_mode[0], cross_mode[1],
                   annihilators});
}

AlgebraResidual deformed_algebra_residual(const LadderSet& l, QValue q,
                                          const FockBasis& basis) {
  const OperatorMatrix id = identity_operator(basis);
  const double q2 = q.squared();
  AlgebraResidual r;
  r.same_mode[0] = (l.A1 * l.A1d - q2 * (l.A1d * l.A1) - id).interior_max_abs(basis);
  r.same_mode[1] = (l.A2 * l.A2d - q2 * (l.A2d * l.A2) - id).interior_max_abs(basis);
  r.cross_mode[0] = (l.A1 * l.A2d - l.A2d * l.A1).interior_max_abs(basis);
  r.cross_mode[1] = (l.A2 * l.A1d - l.A1d * l.A2).interior_max_abs(basis);
  r.annihilators = commutator(l.A1, l.A2).interior_max_abs(basis);
  return r;
}

std::string to_string(CanonicalPair pair) {
  switch (pair) {
    case CanonicalPair::X1X2: return "x1x2";
    case CanonicalPair::X1P1: return "x1p1";
    case CanonicalPair::X2P2: return "x2p2";
    case CanonicalPair::P1P2: return "p1p2";
    case CanonicalPair::X1P2: return "x1p2";
    case CanonicalPair::X2P1: return "x2p1";
  }
  return "?";
}

OperatorMatrix pair_commutator(const CanonicalSet& c, CanonicalPair pair) {
  switch (pair) {
    case CanonicalPair::X1X2: return commutator(c.X1, c.X2);
    case CanonicalPair::X1P1: return commutator(c.X1, c.P1);
    case CanonicalPair::X2P2: return commutator(c.X2, c.P2);
    case CanonicalPair::P1P2: return commutator(c.P1, c.P2);
    case CanonicalPair::X1P2: return commutator(c.X1, c.P2);
    case CanonicalPair::X2P1: return commutator(c.X2, c.P1);
  }
  throw std::invalid_argument("unknown pair");
}

double DynamicalCommutatorReport::max() const {
  double r = std::max(k1_expansion, k2_expansion);
  for (double v : pair_residual) r = std::max(r, v);
  return r;
}

DynamicalCommutatorReport verify_dynamical_commutators(const ModelParams& p,
                                                       const FockBasis& basis) {
  const LadderSet l = ladder_matrices(basis, p.q());
  const CanonicalSet c = canonical_matrices(p, l);
  const OperatorMatrix id = identity_operator(basis);
  const OperatorMatrix N1 = l.A1d * l.A1;
  const OperatorMatrix N2 = l.A2d * l.A2;
  const Complex I(0.0, 1.0);
  const double hbar = p.hbar();
  const double d = 1.0 - p.q().squared();
  const double L2 = 2.0 * p.Lambda * p.Lambda;

  std::array<OperatorMatrix, 6> rhs;
  rhs[0] = I * p.theta() * id + (I * d * hbar * hbar / L2) * (p.K2 * N2 - p.K1 * N1);
  rhs[1] = I * hbar * id -
           (I * d * hbar / L2) * (p.lambda1 * p.K2 * N2 + p.lambda2 * p.K1 * N1);
  rhs[2] = rhs[1];
  rhs[3] = (I * d / L2) * (p.lambda1 * p.lambda1 * p.K2 * N2 -
                           p.lambda2 * p.lambda2 * p.K1 * N1);
  rhs[4] = 0.0 * id;
  rhs[5] = 0.0 * id;

  DynamicalCommutatorReport r;
  for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
    r.pair_residual[i] =
        (pair_commutator(c, kAllPairs[i]) - rhs[i]).interior_max_abs(basis);
  }

  const double a1 = p.lambda1 / hbar;
  const double a2 = p.lambda2 / hbar;
  const OperatorMatrix x1x2 = commutator(c.X1, c.X2);
  const OperatorMatrix x1p1 = commutator(c.X1, c.P1);
  const OperatorMatrix x2p2 = commutator(c.X2, c.P2);
  const OperatorMatrix p1p2 = commutator(c.P1, c.P2);
  const OperatorMatrix squares_x = c.X1 * c.X1 + c.X2 * c.X2;
  const OperatorMatrix squares_p = c.P1 * c.P1 + c.P2 * c.P2;
  const OperatorMatrix k1 =
      (a1 * a1) * squares_x + squares_p - (2.0 * a1) * (c.X1 * c.P2) +
      (2.0 * a1) * (c.X2 * c.P1) + (I * a1 * a1) * x1x2 + (I * a1) * x1p1 +
      (I * a1) * x2p2 + I * p1p2;
  const OperatorMatrix k2 =
      (a2 * a2) * squares_x + squares_p + (2.0 * a2) * (c.X1 * c.P2) -
      (2.0 * a2) * (c.X2 * c.P1) - (I * a2 * a2) * x1x2 + (I * a2) * x1p1 +
      (I * a2) * x2p2 - I * p1p2;
  r.k1_expansion = (k1 - p.K1 * N1).interior_max_abs(basis);
  r.k2_expansion = (k2 - p.K2 * N2).interior_max_abs(basis);
  return r;
}

Complex expectation_value(const Vector& state, const OperatorMatrix& op) {
  return state.dot(op.apply(state));  // dot() conjugates the left argument
}

std::vector<SolvedFormComparison> solved_commutator_forms(
    const ModelParams& p, const CanonicalSet& c, const Vector& state) {
  const Complex I(0.0, 1.0);
  const double q2 = p.q().squared();
  const double d = 1.0 - q2;
  const double s = 1.0 + q2;
  const double hbar = p.hbar();
  const double l1 = p.lambda1, l2 = p.lambda2, L = p.Lambda;
  const double L4 = L * L * L * L;

  auto ev = [&](const OperatorMatrix& m) { return expectation_value(state, m); };
  const Complex x1sq = ev(c.X1 * c.X1);
  const Complex x2sq = ev(c.X2 * c.X2);
  const Complex p1sq = ev(c.P1 * c.P1);
  const Complex p2sq = ev(c.P2 * c.P2);
  const Complex mixed = ev(c.X1 * c.P2 - c.X2 * c.P1);
  const Complex pre = I * d / s;

  std::vector<SolvedFormComparison> out;
  auto finish = [&](std::string name, const OperatorMatrix& comm,
                    std::vector<std::pair<std::string, Complex>> terms) {
    SolvedFormComparison f;
    f.name = std::move(name);
    f.lhs = ev(comm);
    f.rhs = 0.0;
    for (const auto& t : terms) f.rhs += t.second;
    f.discrepancy = f.lhs - f.rhs;
    f.rhs_terms = std::move(terms);
    out.push_back(std::move(f));
  };

  {
    const double asym = (l2 - l1) / L;
    const double mix = 2.0 * hbar * (L * L * L - d * (L - 1.0) * l1 * l2) / L4;
    finish("x1x2", commutator(c.X1, c.X2),
           {{"constant", 2.0 * I * p.theta() / s},
            {"asymmetric_x_squares", pre * asym * (x1sq + x2sq)},
            {"mixed", pre * mix * mixed}});
  }
  {
    const double xs = l1 * l2 / L;
    const double ps = 2.0 * hbar / L;
    const double mix = 2.0 * d * (l1 - l2) * (L - 1.0) * l1 * l2 / L4;
    const std::vector<std::pair<std::string, Complex>> terms = {
        {"constant", 2.0 * I * hbar / s},
        {"x_squares", -pre * xs * (x1sq + x2sq)},
        {"p_squares", -pre * ps * (p1sq + p2sq)},
        {"mixed", pre * mix * mixed}};
    finish("x1p1", commutator(c.X1, c.P1), terms);
    finish("x2p2", commutator(c.X2, c.P2), terms);
  }
  {
    const double xs = (hbar - 1.0) * (l1 - l2) * l1 * l2 / (hbar * hbar * L);
    const double ps = 2.0 * (l1 - l2) / L;
    const double mix =
        l1 * l2 *
        ((2.0 * L * L * L - s * (L - 1.0) * L * L) / (hbar * L4) -
         2.0 * d * (L - 1.0) * (l1 * l1 + l2 * l2 - l1 * l2) / (hbar * L4));
    finish("p1p2", commutator(c.P1, c.P2),
           {{"x_squares", pre * xs * (x1sq + x2sq)},
            {"p_squares", pre * ps * (p1sq + p2sq)},
            {"mixed", pre * mix * mixed}});
  }
  return out;
}

}  // namespace qbicoh
