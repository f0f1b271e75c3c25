#include "qbicoh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qbicoh/errors.hpp"
#include "qbicoh/uncertainty.hpp"

namespace qbicoh {

namespace {

constexpr double kUnitNormSlack = 1e-12;

struct LadderFactor {
  const char* name;
  int mode;     // 1 or 2
  bool raising;
};

constexpr std::array<LadderFactor, 4> kFactors = {{
    {"A1", 1, false}, {"A1dag", 1, true}, {"A2", 2, false}, {"A2dag", 2, true}}};

const OperatorMatrix& factor_matrix(const LadderSet& l, const LadderFactor& f) {
  if (f.mode == 1) return f.raising ? l.A1d : l.A1;
  return f.raising ? l.A2d : l.A2;
}

// Closed form of <a b> for two ladder factors, from the series values only.
Complex bilinear_closed_form(const LadderFactor& a, const LadderFactor& b,
                             const CoherentLabel& label, QValue q, const GBundle& g) {
  if (a.mode == b.mode) {
    const double J = a.mode == 1 ? label.J1 : label.J2;
    const Complex Fq = a.mode == 1 ? g.Fq1 : g.Fq2;
    if (!a.raising && !b.raising) return J / g.E * std::conj(Fq);
    if (a.raising && b.raising) return J / g.E * Fq;
    if (a.raising) return J;                 // A^dag A
    return 1.0 + q.squared() * J;            // A A^dag
  }
  // Different modes commute; order the factors as (mode 1, mode 2).
  const LadderFactor& m1 = a.mode == 1 ? a : b;
  const LadderFactor& m2 = a.mode == 1 ? b : a;
  const double scale = std::sqrt(label.J1 * label.J2) / g.E;
  if (!m1.raising && !m2.raising) return scale * std::conj(g.Fpp);
  if (m1.raising && m2.raising) return scale * g.Fpp;
  if (m1.raising) return scale * g.Fpm;  // A1^dag A2 ~ F(g1, -g2)
  return scale * std::conj(g.Fpm);       // A1 A2^dag ~ F(-g1, g2)
}

}  // namespace

Complex expectation(const StateVector& state, const OperatorMatrix& op) {
  if (op.dim() != state.basis.dim() ||
      static_cast<std::size_t>(state.amplitudes.size()) != state.basis.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch between state (" +
                                std::to_string(state.amplitudes.size()) +
                                ") and operator (" + std::to_string(op.dim()) + ")");
  }
  if (std::abs(state.norm() - 1.0) > kUnitNormSlack) {
    throw std::invalid_argument("expectation: state is not normalized (norm " +
                                std::to_string(state.norm()) + ")");
  }
  return expectation_value(state.amplitudes, op);
}

Vector propagate_diagonal(const StateVector& state, const OperatorMatrix& H, double t) {
  if (H.dim() != state.basis.dim()) {
    throw std::invalid_argument("propagate_diagonal: dimension mismatch");
  }
  const SparseMatrix& m = H.matrix();
  Vector out = state.amplitudes;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col() && it.value() != Complex{}) {
        throw std::invalid_argument("propagate_diagonal: H is not diagonal");
      }
    }
  }
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const Complex e = H.entry(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    out[k] *= std::exp(Complex(0.0, -t) * e);
  }
  return out;
}

MatrixMoments matrix_moments(const StateVector& state, const ModelParams& params) {
  const LadderSet ladders = ladder_matrices(state.basis, params.q());
  const CanonicalSet c = canonical_matrices(params, ladders);
  const std::array<const OperatorMatrix*, 4> ops = {&c.X1, &c.X2, &c.P1, &c.P2};

  MatrixMoments m;
  for (std::size_t i = 0; i < 4; ++i) {
    m.mean[i] = expectation(state, *ops[i]);
    m.square[i] = expectation(state, (*ops[i]) * (*ops[i]));
    m.variance[i] = (m.square[i] - m.mean[i] * m.mean[i]).real();
  }
  for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
    m.commutator[i] = expectation(state, pair_commutator(c, kAllPairs[i]));
  }
  return m;
}

std::vector<CrossCheckReport> crosscheck(const CoherentLabel& label,
                                         const ModelParams& params,
                                         const CrossCheckOptions& opts) {
  const double state_tol = opts.tol / 10.0;
  StateVector state;
  if (opts.fixed_cutoff > 0) {
    state = build_coherent_vector(label, params.q(), build_basis(opts.fixed_cutoff),
                                  PhaseConvention::Deformed, state_tol);
  } else {
    StateOptions so;
    so.tol = state_tol;
    so.max_cutoff = opts.max_cutoff;
    state = build_coherent_state(label, params.q(), so);
  }

  const GBundle g = g_bundle(label, params.q(), opts.series);
  const double tail = state.truncation_error + g.tail / g.E;
  const std::size_t N = state.basis.cutoff();

  std::vector<CrossCheckReport> out;
  auto add = [&](std::string name, Complex closed, Complex matrix) {
    CrossCheckReport r;
    r.quantity = std::move(name);
    r.closed_form = closed;
    r.matrix_value = matrix;
    r.abs_diff = std::abs(closed - matrix);
    r.cutoff_used = N;
    r.tail_estimate = tail;
    out.push_back(std::move(r));
  };

  const LadderSet ladders = ladder_matrices(state.basis, params.q());
  for (const LadderFactor& a : kFactors) {
    for (const LadderFactor& b : kFactors) {
      const Complex matrix =
          expectation(state, factor_matrix(ladders, a) * factor_matrix(ladders, b));
      add(std::string("<") + a.name + " " + b.name + ">",
          bilinear_closed_form(a, b, label, params.q(), g), matrix);
    }
  }

  static constexpr std::array<const char*, 4> kOps = {"X1", "X2", "P1", "P2"};
  const MatrixMoments mm = matrix_moments(state, params);
  const CanonicalMoments cm = closed_form_moments(label, params, g);
  const VarianceSet v = variances_unchecked(label, params, g);
  const std::array<double, 4> cv = {v.chi1, v.chi2, v.kappa1, v.kappa2};
  for (std::size_t i = 0; i < 4; ++i) {
    add(std::string("<") + kOps[i] + ">", cm.mean[i], mm.mean[i]);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    add(std::string("<") + kOps[i] + "^2>", cm.square[i], mm.square[i]);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    add(std::string("var ") + kOps[i], cv[i], mm.variance[i]);
  }
  const std::array<Complex, 6> cc = commutator_means(label, params);
  for (std::size_t i = 0; i < 4; ++i) {
    add("<[" + to_string(kAllPairs[i]) + "]>", cc[i], mm.commutator[i]);
  }
  return out;
}

double max_abs_diff(const std::vector<CrossCheckReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.abs_diff);
  return m;
}

nlohmann::json to_json(const CrossCheckReport& r) {
  return {{"quantity", r.quantity},
          {"closed_form", {r.closed_form.real(), r.closed_form.imag()}},
          {"matrix_value", {r.matrix_value.real(), r.matrix_value.imag()}},
          {"abs_diff", r.abs_diff},
          {"cutoff_used", r.cutoff_used},
          {"tail_estimate", r.tail_estimate}};
}

void write_json_lines(std::ostream& out, const std::vector<CrossCheckReport>& reports) {
  for (const auto& r : reports) out << to_json(r).dump() << '\n';
}

}  // namespace qbicoh
