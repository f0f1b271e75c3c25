#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qbicoh/label.hpp"
#include "qbicoh/sweep.hpp"

namespace qbicoh {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

// Algebra residuals, dynamical commutators, closed-form/oracle crosschecks
// and limit checks over the configured grid. Writes a JSON summary to
// cfg.output_path (or `out`).
int cmd_verify(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
// The checks behind cmd_verify; "status" is "pass" or "fail".
nlohmann::json verify_suite(const SweepConfig& cfg, std::ostream& err);

// Records to cfg.output_path (or `out`); the summary goes next to the
// output as <output_path>.summary.json, or to `err` when writing to `out`.
int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& err);

// Time series along gamma_i(t) = gamma_i + lambda_i t / m. Writes one
// two-column "t value" file per quantity plus timeseries.csv (or .json)
// into the directory cfg.output_path (default "evolve_out").
int cmd_evolve(const SweepConfig& cfg, const CoherentLabel& label,
               const std::vector<double>& t_grid, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbicoh
