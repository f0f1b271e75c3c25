#pragma once

// Grid sweeps over (q, theta, J1, J2, gamma1, gamma2, t) with a worker pool
// and a single deterministic emitter.
//
// Config schema (JSON object, every key optional):
//   q_grid, theta_grid, J1_grid, J2_grid, gamma1_grid, gamma2_grid, t_grid
//       a number, a list of numbers, or {"start": a, "stop": b, "num": n}
//       (inclusive linspace)
//   m, omega, hbar       positive reals (default 1)
//   cutoff               integer >= 2 or "auto" (default "auto")
//   convention           "spectral-gap" (default) or "paper-literal"
//   tol                  GUR satisfaction band, default 1e-9
//   output_path          file (sweep/verify) or directory (evolve)
//   format               "csv" (default) or "json"
//   workers              thread count, 0 = hardware concurrency
// Unknown keys are rejected.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbicoh/label.hpp"
#include "qbicoh/model.hpp"
#include "qbicoh/series.hpp"
#include "qbicoh/uncertainty.hpp"

namespace qbicoh {

enum class OutputFormat { Csv, Json };

struct SweepConfig {
  std::vector<double> q_grid{1.0};
  std::vector<double> theta_grid{0.0};
  std::vector<double> J1_grid{0.5};
  std::vector<double> J2_grid{0.5};
  std::vector<double> gamma1_grid{0.0};
  std::vector<double> gamma2_grid{0.0};
  std::vector<double> t_grid{0.0};
  double m = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  std::optional<std::size_t> cutoff;  // nullopt = auto
  ExponentConvention convention = ExponentConvention::SpectralGap;
  double tol = 1e-9;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  std::size_t workers = 0;
};

// Inclusive, num >= 1 (num = 1 yields {start}).
std::vector<double> linspace(double start, double stop, std::size_t num);

// Throw ConfigError on malformed input.
SweepConfig parse_config(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);
nlohmann::json config_to_json(const SweepConfig& cfg);

// Grid coordinates; gamma is the value at t = 0.
struct GridPoint {
  double q = 1.0, theta = 0.0;
  double J1 = 0.0, J2 = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double t = 0.0;
};

// Row-major over q, theta, J1, J2, gamma1, gamma2, t (t fastest).
std::vector<GridPoint> expand_grid(const SweepConfig& cfg);

struct SweepRecord {
  GridPoint point;
  ModelParams params;
  CoherentLabel label;  // gamma advanced to t
  PointAnalysis analysis;
};

struct SkippedPoint {
  GridPoint point;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // grid order
  std::vector<SkippedPoint> skipped;
};

// Evaluates one grid point; throws DomainError / CutoffError /
// InvariantError for points the sweep should skip.
SweepRecord evaluate_point(const GridPoint& point, const SweepConfig& cfg);

// Processes the grid on cfg.workers threads; records come back in grid order
// whatever the scheduling.
SweepResult run_sweep(const SweepConfig& cfg, std::ostream* log = nullptr);

// "%.16e": 17 significant digits, lowercase scientific.
std::string format_double(double x);
const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
nlohmann::json record_to_json(const SweepRecord& record);
void write_json(std::ostream& out, const std::vector<SweepRecord>& records);

// Counts, skipped points, saturation points and violation witnesses
// (min_ratio < 1 - witness_margin).
inline constexpr double kWitnessMargin = 1e-6;
nlohmann::json sweep_summary(const SweepResult& result, const SweepConfig& cfg);

}  // namespace qbicoh
