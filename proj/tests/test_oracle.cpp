#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qbicoh/errors.hpp"
#include "qbicoh/oracle.hpp"
#include "support.hpp"

using namespace qbicoh;

namespace {

const CrossCheckReport& find(const std::vector<CrossCheckReport>& r, const std::string& name) {
  for (const auto& x : r) {
    if (x.quantity == name) return x;
  }
  throw std::out_of_range(name);
}

CrossCheckOptions tight(ExponentConvention c = ExponentConvention::SpectralGap) {
  CrossCheckOptions o;
  o.tol = 1e-13;
  o.max_cutoff = 256;
  o.series.convention = c;
  return o;
}

}  // namespace

TEST_CASE("expectation basics") {
  const QValue q(0.6);
  const StateVector vac = build_coherent_state(CoherentLabel{}, q);
  const LadderSet lv = ladder_matrices(vac.basis, q);
  CHECK(expectation(vac, number_operator(lv, 1)) == Complex{});

  const CoherentLabel label{0.8, 0.5, 0.45, 2.0};
  const StateVector s = build_coherent_state(label, q);
  const LadderSet l = ladder_matrices(s.basis, q);
  CHECK(std::abs(expectation(s, l.A2d * l.A2) - 0.45) < 1e-10);
  CHECK(std::abs(expectation(s, l.A1 * l.A1d) - (1.0 + 0.36 * 0.8)) < 1e-10);

  CHECK_THROWS_AS(expectation(s, identity_operator(FockBasis(3))), std::invalid_argument);
  StateVector scaled = s;
  scaled.amplitudes *= 1.01;
  CHECK_THROWS_AS(expectation(scaled, l.A1), std::invalid_argument);
}

TEST_CASE("propagate_diagonal rejects non-diagonal generators") {
  const QValue q(1.0);
  const StateVector s = build_coherent_state(CoherentLabel{0.3, 0.0, 0.2, 0.0}, q);
  const LadderSet l = ladder_matrices(s.basis, q);
  CHECK_THROWS_AS(propagate_diagonal(s, l.A1 + l.A1d, 1.0), std::invalid_argument);
  const Vector same = propagate_diagonal(s, number_operator(l, 1), 0.0);
  CHECK((same - s.amplitudes).norm() == 0.0);
}

TEST_CASE("crosscheck covers every identity") {
  const auto r = crosscheck(CoherentLabel{0.5, 0.3, 0.2, -0.1}, test::params(0.8, 0.2));
  CHECK(r.size() == 32);
  CHECK(find(r, "<A1dag A1>").closed_form == Complex(0.5, 0.0));
  CHECK(find(r, "var P2").cutoff_used > 2);
  for (const auto& x : r) CHECK(x.tail_estimate < 1e-10);
}

TEST_CASE("undeformed limit agrees everywhere") {
  const auto r = crosscheck(CoherentLabel{0.9, 1.1, 0.6, -2.2}, test::params(1.0, 0.0), tight());
  for (const auto& x : r) {
    CAPTURE(x.quantity);
    CHECK(x.abs_diff < 1e-10);
  }
}

TEST_CASE("spectral-gap closed forms agree on random labels") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 6; ++trial) {
    const ModelParams p = test::params(0.35 + 0.1 * trial, 0.25 * trial);
    const CoherentLabel label = test::random_label(rng, p.q(), 0.7);
    const auto r = crosscheck(label, p, tight());
    CHECK(find(r, "<A1 A1>").abs_diff < 1e-10);
    CHECK(max_abs_diff(r) < 1e-9);
  }
}

TEST_CASE("paper-literal exponent disagrees away from zero phase") {
  const ModelParams p = test::params(0.5, 0.0);
  const CoherentLabel label{1.0, 2.0, 0.5, 0.0};
  const auto lit = crosscheck(label, p, tight(ExponentConvention::PaperLiteral));
  const auto gap = crosscheck(label, p, tight());
  CHECK(find(lit, "<A1 A1>").abs_diff > 1e-4);
  CHECK(find(gap, "<A1 A1>").abs_diff < 1e-10);
  // Number operators carry no phase and agree in both.
  CHECK(find(lit, "<A1dag A1>").abs_diff < 1e-10);
}

TEST_CASE("fixed cutoff must hold the state") {
  CrossCheckOptions o;
  o.fixed_cutoff = 6;
  CHECK_THROWS_AS(crosscheck(CoherentLabel{1.0, 0.0, 1.0, 0.0}, test::params(0.5), o),
                  CutoffError);
  o.fixed_cutoff = 120;
  CHECK(max_abs_diff(crosscheck(CoherentLabel{1.0, 0.0, 1.0, 0.0}, test::params(0.5), o)) < 1e-9);
}

TEST_CASE("json lines") {
  const auto r = crosscheck(CoherentLabel{0.2, 0.0, 0.1, 0.0}, test::params(0.9));
  std::ostringstream out;
  write_json_lines(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("quantity"));
    CHECK(j["closed_form"].size() == 2);
    CHECK(j["abs_diff"].get<double>() >= 0.0);
    ++n;
  }
  CHECK(n == r.size());
}
