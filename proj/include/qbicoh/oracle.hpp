#pragma once

// Brute-force verification path: every expectation is evaluated directly as
// <psi|M|psi> with truncated state vectors and operator matrices, never
// through the series closed forms.

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbicoh/fock.hpp"
#include "qbicoh/label.hpp"
#include "qbicoh/model.hpp"
#include "qbicoh/series.hpp"
#include "qbicoh/states.hpp"

namespace qbicoh {

// Throws std::invalid_argument on dimension mismatch or a non-unit state.
Complex expectation(const StateVector& state, const OperatorMatrix& op);

// exp(-i H t)|psi> for a diagonal H. Throws std::invalid_argument if H has
// off-diagonal entries.
Vector propagate_diagonal(const StateVector& state, const OperatorMatrix& H, double t);

// Matrix-evaluated moments of the canonical operators in one state.
struct MatrixMoments {
  std::array<Complex, 4> mean{};      // X1, X2, P1, P2
  std::array<Complex, 4> square{};    // <O^2>
  std::array<double, 4> variance{};   // <O^2> - <O>^2, real part
  std::array<Complex, 6> commutator{};  // <[O1, O2]>, indexed like kAllPairs
};

MatrixMoments matrix_moments(const StateVector& state, const ModelParams& params);

struct CrossCheckReport {
  std::string quantity;
  Complex closed_form;
  Complex matrix_value;
  double abs_diff = 0.0;
  std::size_t cutoff_used = 0;
  double tail_estimate = 0.0;
};

struct CrossCheckOptions {
  double tol = 1e-10;  // the state's neglected weight must stay below tol/10
  SeriesOptions series;
  std::size_t max_cutoff = 192;
  std::size_t fixed_cutoff = 0;  // 0 selects the cutoff automatically
};

// One report per identity: sixteen ladder bilinears, four first moments,
// four second moments, four variances and four commutator means.
std::vector<CrossCheckReport> crosscheck(const CoherentLabel& label,
                                         const ModelParams& params,
                                         const CrossCheckOptions& opts = {});

double max_abs_diff(const std::vector<CrossCheckReport>& reports);

nlohmann::json to_json(const CrossCheckReport& report);
// One JSON object per line.
void write_json_lines(std::ostream& out, const std::vector<CrossCheckReport>& reports);

}  // namespace qbicoh
