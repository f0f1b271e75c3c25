#include <doctest.h>

#include <cmath>
#include <random>

#include "qbicoh/errors.hpp"
#include "qbicoh/fock.hpp"
#include "support.hpp"

using namespace qbicoh;

namespace {

const Complex I(0.0, 1.0);

double interior_distance(const OperatorMatrix& a, const OperatorMatrix& b,
                         const FockBasis& basis) {
  return (a - b).interior_max_abs(basis);
}

}  // namespace

TEST_CASE("basis indexing") {
  CHECK(FockBasis(2).dim() == 4);
  const FockBasis b = build_basis(8);
  CHECK(b.dim() == 64);
  CHECK(b.index(3, 5) == 29);
  CHECK(b.modes(29) == std::pair<std::size_t, std::size_t>{3, 5});
  CHECK(b.interior(b.index(6, 6)));
  CHECK_FALSE(b.interior(b.index(7, 0)));
  CHECK_FALSE(b.interior(b.index(0, 7)));
  CHECK_THROWS_AS(build_basis(1), DomainError);
  CHECK_THROWS_AS(build_basis(0), DomainError);
  CHECK_THROWS(b.index(8, 0));
}

TEST_CASE("ladders at q = 1 are the standard annihilation matrices") {
  const FockBasis b(4);
  const LadderSet l = ladder_matrices(b, QValue(1.0));
  for (std::size_t n1 = 0; n1 < 4; ++n1) {
    for (std::size_t n2 = 0; n2 < 4; ++n2) {
      for (std::size_t m1 = 0; m1 < 4; ++m1) {
        for (std::size_t m2 = 0; m2 < 4; ++m2) {
          const Complex a1 = l.A1.entry(b.index(m1, m2), b.index(n1, n2));
          const Complex a2 = l.A2.entry(b.index(m1, m2), b.index(n1, n2));
          const double e1 = (m1 + 1 == n1 && m2 == n2) ? std::sqrt(double(n1)) : 0.0;
          const double e2 = (m2 + 1 == n2 && m1 == n1) ? std::sqrt(double(n2)) : 0.0;
          CHECK(std::abs(a1 - e1) < 1e-15);
          CHECK(std::abs(a2 - e2) < 1e-15);
        }
      }
    }
  }
}

TEST_CASE("deformed ladder entries") {
  const FockBasis b(6);
  const LadderSet l = ladder_matrices(b, QValue(0.5));
  CHECK(l.A1.entry(b.index(1, 0), b.index(2, 0)).real() ==
        doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(l.A1d.entry(b.index(2, 3), b.index(1, 3)).real() ==
        doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  // Vacuum annihilation in mode 1 for every n2.
  for (std::size_t n2 = 0; n2 < 6; ++n2) {
    Vector v = Vector::Zero(36);
    v[static_cast<Eigen::Index>(b.index(0, n2))] = 1.0;
    CHECK(l.A1.apply(v).norm() == 0.0);
  }
  // Hard truncation: raising the top level gives zero.
  Vector top = Vector::Zero(36);
  top[static_cast<Eigen::Index>(b.index(5, 2))] = 1.0;
  CHECK(l.A1d.apply(top).norm() == 0.0);
  // The raising matrices are built independently but equal the adjoints.
  CHECK((l.A1d - l.A1.adjoint()).max_abs() < 1e-15);
  CHECK((l.A2d - l.A2.adjoint()).max_abs() < 1e-15);
}

TEST_CASE("deformed algebra residual on the interior") {
  for (double q : {1.0, 0.5, 0.3, 0.8}) {
    const FockBasis b(6);
    const AlgebraResidual r = deformed_algebra_residual(ladder_matrices(b, QValue(q)), QValue(q), b);
    CAPTURE(q);
    CHECK(r.same_mode[0] < 1e-13);
    CHECK(r.same_mode[1] < 1e-13);
    CHECK(r.cross_mode[0] < 1e-13);
    CHECK(r.cross_mode[1] < 1e-13);
    CHECK(r.annihilators < 1e-13);
  }
}

TEST_CASE("truncation shows up only on the boundary") {
  const FockBasis b(5);
  const QValue q(0.7);
  const LadderSet l = ladder_matrices(b, q);
  const OperatorMatrix defect =
      l.A1 * l.A1d - q.squared() * (l.A1d * l.A1) - identity_operator(b);
  CHECK(defect.interior_max_abs(b) < 1e-14);
  CHECK(defect.max_abs() > 0.5);
}

TEST_CASE("canonical matrices are Hermitian and invert back to the ladders") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double q = 0.3 + 0.7 * u(rng);
    const ModelParams p = test::params(q, 3.0 * u(rng), 0.5 + u(rng), 0.5 + u(rng), 0.5 + u(rng));
    const FockBasis b(7);
    const LadderSet l = ladder_matrices(b, p.q());
    const CanonicalSet c = canonical_matrices(p, l);
    for (const OperatorMatrix* o : {&c.X1, &c.X2, &c.P1, &c.P2}) {
      CHECK(o->hermiticity_defect() < 1e-13);
      CHECK(o->hermitian_hint());
    }
    // Invert the linear map by hand: with s_i = sqrt(K_i) / (2 Lambda),
    //   A1 + A1^dag = (P2 - lambda1 X1 / hbar) / (Lambda s1)
    //   A1 - A1^dag = -i (lambda1 X2 / hbar + P1) / (Lambda s1)
    const double s1 = std::sqrt(p.K1) / (2.0 * p.Lambda);
    const double s2 = std::sqrt(p.K2) / (2.0 * p.Lambda);
    const double hb = p.hbar();
    const OperatorMatrix plus1 = (1.0 / (p.Lambda * s1)) * (c.P2 - (p.lambda1 / hb) * c.X1);
    const OperatorMatrix minus1 =
        (-I / (p.Lambda * s1)) * ((p.lambda1 / hb) * c.X2 + c.P1);
    const OperatorMatrix A1 = 0.5 * (plus1 + minus1);
    CHECK(interior_distance(A1, l.A1, b) < 1e-12);
    // A2 + A2^dag = (lambda2 X1 / hbar + P2) / (Lambda s2)
    // A2 - A2^dag = -i (lambda2 X2 / hbar - P1) / (Lambda s2)
    const OperatorMatrix plus2 = (1.0 / (p.Lambda * s2)) * ((p.lambda2 / hb) * c.X1 + c.P2);
    const OperatorMatrix minus2 =
        (-I / (p.Lambda * s2)) * ((p.lambda2 / hb) * c.X2 - c.P1);
    CHECK(interior_distance(0.5 * (plus2 + minus2), l.A2, b) < 1e-12);
  }
}

TEST_CASE("canonical commutators at q = 1") {
  for (double theta : {0.0, 0.5, 2.0}) {
    const ModelParams p = test::params(1.0, theta);
    const FockBasis b(12);
    const CanonicalSet c = canonical_matrices(p, ladder_matrices(b, p.q()));
    const OperatorMatrix id = identity_operator(b);
    CAPTURE(theta);
    CHECK(interior_distance(commutator(c.X1, c.X2), (I * theta) * id, b) < 1e-11);
    CHECK(interior_distance(commutator(c.X1, c.P1), I * id, b) < 1e-11);
    CHECK(interior_distance(commutator(c.X2, c.P2), I * id, b) < 1e-11);
    CHECK(commutator(c.P1, c.P2).interior_max_abs(b) < 1e-11);
    CHECK(commutator(c.X1, c.P2).interior_max_abs(b) < 1e-13);
    CHECK(commutator(c.X2, c.P1).interior_max_abs(b) < 1e-13);
  }
}

TEST_CASE("dynamical commutators follow from the deformed algebra") {
  const ModelParams p = test::params(0.8, 0.3);
  const DynamicalCommutatorReport r = verify_dynamical_commutators(p, FockBasis(8));
  for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
    CAPTURE(to_string(kAllPairs[i]));
    CHECK(r.pair_residual[i] < 1e-10);
  }
  CHECK(r.k1_expansion < 1e-10);
  CHECK(r.k2_expansion < 1e-10);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const ModelParams pr = test::params(0.2 + 0.8 * u(rng), 2.0 * u(rng));
    const DynamicalCommutatorReport rr = verify_dynamical_commutators(pr, FockBasis(7));
    CHECK(rr.max() < 1e-10);
    CHECK(rr.pair_residual[4] < 1e-13);  // [X1, P2]
    CHECK(rr.pair_residual[5] < 1e-13);  // [X2, P1]
  }
}

TEST_CASE("solved commutator forms at q = 1 reduce to i theta") {
  const ModelParams p = test::params(1.0, 0.7);
  const FockBasis b(10);
  const CanonicalSet c = canonical_matrices(p, ladder_matrices(b, p.q()));
  Vector vac = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  vac[0] = 1.0;
  const auto forms = solved_commutator_forms(p, c, vac);
  REQUIRE(forms.size() == 4);
  CHECK(forms[0].name == "x1x2");
  CHECK(std::abs(forms[0].lhs - I * 0.7) < 1e-12);
  CHECK(std::abs(forms[0].discrepancy) < 1e-12);
}

TEST_CASE("solved forms at theta = 0 drop the asymmetric terms") {
  const ModelParams p = test::params(0.9, 0.0);
  const FockBasis b(10);
  const CanonicalSet c = canonical_matrices(p, ladder_matrices(b, p.q()));
  Vector vac = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  vac[0] = 1.0;
  for (const auto& f : solved_commutator_forms(p, c, vac)) {
    for (const auto& [name, value] : f.rhs_terms) {
      if (name == "asymmetric_x_squares" || name == "mixed") CHECK(std::abs(value) == 0.0);
    }
    CHECK(std::isfinite(std::abs(f.rhs)));
  }
}

TEST_CASE("hamiltonian is diagonal with the two-mode spectrum") {
  const ModelParams p = test::params(0.6, 0.4);
  const FockBasis b(5);
  const LadderSet l = ladder_matrices(b, p.q());
  const OperatorMatrix H = hamiltonian(p, l);
  CHECK(H.hermitian_hint());
  for (std::size_t n1 = 0; n1 < 5; ++n1) {
    for (std::size_t n2 = 0; n2 < 5; ++n2) {
      const std::size_t k = b.index(n1, n2);
      const double e = (p.lambda1 * q_int(n1, p.q()) + p.lambda2 * q_int(n2, p.q())) / p.m();
      CHECK(H.entry(k, k).real() == doctest::Approx(e).epsilon(1e-14));
    }
  }
  CHECK((number_operator(l, 1) - l.A1d * l.A1).max_abs() == 0.0);
}

TEST_CASE("hermitian hint is enforced") {
  SparseMatrix m(4, 4);
  m.insert(0, 1) = 1.0;
  CHECK_THROWS_AS(OperatorMatrix(m, true), InvariantError);
  CHECK_NOTHROW(OperatorMatrix(m, false));
  const OperatorMatrix a(m);
  CHECK_FALSE((a * a.adjoint()).hermitian_hint());
  CHECK((a + a.adjoint()).hermiticity_defect() == 0.0);
}

TEST_CASE("expectation_value") {
  const FockBasis b(4);
  const LadderSet l = ladder_matrices(b, QValue(1.0));
  Vector v = Vector::Zero(16);
  v[static_cast<Eigen::Index>(b.index(2, 1))] = 1.0;
  CHECK(expectation_value(v, number_operator(l, 1)).real() == doctest::Approx(2.0));
  CHECK(expectation_value(v, number_operator(l, 2)).real() == doctest::Approx(1.0));
}
