#include "qbicoh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbicoh/errors.hpp"
#include "qbicoh/fock.hpp"
#include "qbicoh/oracle.hpp"
#include "qbicoh/states.hpp"

namespace qbicoh {

namespace {

using nlohmann::json;

constexpr std::size_t kDefaultVerifyCutoff = 16;
constexpr double kAlgebraTol = 1e-12;
constexpr double kCrosscheckTol = 1e-9;
constexpr double kIdentityTol = 1e-10;
// Neglected-weight budget for crosscheck states; boundary rows of A A^dag
// amplify the truncated weight by about N.
constexpr double kStateBudget = 1e-13;

class CheckList {
 public:
  void add(std::string name, double value, double threshold, bool asserted = true,
           json context = json::object()) {
    const bool ok = std::isfinite(value) && value <= threshold;
    context["name"] = std::move(name);
    context["value"] = value;
    context["threshold"] = threshold;
    context["passed"] = ok;
    context["asserted"] = asserted;
    if (asserted && !ok) ++failed_;
    checks_.push_back(std::move(context));
  }
  void error(std::string name, const std::string& what, json context = json::object()) {
    context["name"] = std::move(name);
    context["error"] = what;
    context["passed"] = false;
    context["asserted"] = true;
    ++failed_;
    checks_.push_back(std::move(context));
  }
  std::size_t failed() const { return failed_; }
  const json& checks() const { return checks_; }

 private:
  json checks_ = json::array();
  std::size_t failed_ = 0;
};

ModelParams params_for(const SweepConfig& cfg, double q, double theta) {
  PhysicalInputs in;
  in.m = cfg.m;
  in.omega = cfg.omega;
  in.hbar = cfg.hbar;
  in.theta = theta;
  in.q = QValue(q);
  in.validate();
  return derive_params(in);
}

json label_json(double q, double theta, const CoherentLabel& l) {
  return {{"q", q}, {"theta", theta}, {"J1", l.J1}, {"J2", l.J2},
          {"gamma1", l.gamma1}, {"gamma2", l.gamma2}};
}

// Domain problems in verify are configuration errors, so check them all
// before running anything.
void validate_domain(const SweepConfig& cfg) {
  for (double q : cfg.q_grid) {
    for (double th : cfg.theta_grid) params_for(cfg, q, th);
    const QValue qv(q);
    for (double J : cfg.J1_grid) require_inside_radius(J, qv, "J1");
    for (double J : cfg.J2_grid) require_inside_radius(J, qv, "J2");
  }
}

void canonical_limit_checks(CheckList& checks, const ModelParams& p,
                            const FockBasis& basis, const json& ctx) {
  const LadderSet l = ladder_matrices(basis, p.q());
  const CanonicalSet c = canonical_matrices(p, l);
  const OperatorMatrix id = identity_operator(basis);
  const Complex I(0.0, 1.0);
  const double scale = std::max({1.0, p.hbar(), p.theta()});
  auto check = [&](const char* name, const OperatorMatrix& comm, Complex value) {
    checks.add(name, (comm - value * id).interior_max_abs(basis), 10 * kAlgebraTol * scale,
               true, ctx);
  };
  check("canonical [X1,X2] = i theta", commutator(c.X1, c.X2), I * p.theta());
  check("canonical [X1,P1] = i hbar", commutator(c.X1, c.P1), I * p.hbar());
  check("canonical [X2,P2] = i hbar", commutator(c.X2, c.P2), I * p.hbar());
  check("canonical [P1,P2] = 0", commutator(c.P1, c.P2), 0.0);
}

void label_checks(CheckList& checks, const SweepConfig& cfg, const ModelParams& p,
                  const CoherentLabel& label) {
  const json ctx = label_json(p.q().value(), p.theta(), label);
  const bool gap = cfg.convention == ExponentConvention::SpectralGap;

  CrossCheckOptions co;
  co.series.convention = cfg.convention;
  co.tol = kStateBudget;
  co.max_cutoff = std::max<std::size_t>(cfg.cutoff.value_or(0), 256);
  try {
    const auto reports = crosscheck(label, p, co);
    double worst = 0.0;
    std::string worst_name;
    for (const auto& r : reports) {
      const double rel = r.abs_diff / std::max(1.0, std::abs(r.closed_form));
      if (rel >= worst) {
        worst = rel;
        worst_name = r.quantity;
      }
    }
    json c = ctx;
    c["worst_quantity"] = worst_name;
    c["cutoff_used"] = reports.front().cutoff_used;
    c["convention"] = to_string(cfg.convention);
    // Only the spectral-gap exponent is expected to reproduce the matrices.
    checks.add("crosscheck closed form vs matrix", worst, kCrosscheckTol, gap, c);
  } catch (const CutoffError& e) {
    checks.error("crosscheck closed form vs matrix", e.what(), ctx);
  }

  StateOptions so;
  so.max_cutoff = 256;
  try {
    const double scale = std::max(1.0, (p.lambda1 * label.J1 + p.lambda2 * label.J2) / p.m());
    checks.add("action identity", std::abs(action_identity_check(label, p, so)),
               kIdentityTol * scale, true, ctx);

    const StateVector psi = build_coherent_state(label, p.q(), so);
    const LadderSet l = ladder_matrices(psi.basis, p.q());
    const OperatorMatrix H = hamiltonian(p, l);
    for (double t : cfg.t_grid) {
      const Vector moved = propagate_diagonal(psi, H, t);
      const StateVector target =
          build_coherent_vector(evolve(label, t, p), p.q(), psi.basis,
                                PhaseConvention::Deformed, so.tol);
      json c = ctx;
      c["t"] = t;
      checks.add("temporal stability", (moved - target.amplitudes).norm(), kIdentityTol,
                 true, c);
    }
  } catch (const CutoffError& e) {
    checks.error("state construction", e.what(), ctx);
  }

  if (gap && p.theta() == 0.0 && label.gamma1 == 0.0 && label.gamma2 == 0.0) {
    GurOptions go;
    go.series.convention = cfg.convention;
    const PointAnalysis a = analyze_point(label, p, go);
    checks.add("saturation x1p1", std::abs(a.gur[1].ratio - 1.0), kIdentityTol, true, ctx);
    checks.add("saturation x2p2", std::abs(a.gur[2].ratio - 1.0), kIdentityTol, true, ctx);
  }
}

std::ostream& open_or(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return file;
}

}  // namespace

json verify_suite(const SweepConfig& cfg, std::ostream& err) {
  validate_domain(cfg);
  CheckList checks;
  const FockBasis basis = build_basis(cfg.cutoff.value_or(kDefaultVerifyCutoff));

  for (double q : cfg.q_grid) {
    for (double th : cfg.theta_grid) {
      const ModelParams p = params_for(cfg, q, th);
      const json ctx = {{"q", q}, {"theta", th}, {"cutoff", basis.cutoff()}};
      const double nq = q_int(basis.cutoff(), p.q());

      const LadderSet l = ladder_matrices(basis, p.q());
      checks.add("deformed algebra residual",
                 deformed_algebra_residual(l, p.q(), basis).max(),
                 kAlgebraTol * std::max(1.0, nq), true, ctx);

      const DynamicalCommutatorReport dyn = verify_dynamical_commutators(p, basis);
      const double dscale =
          std::max({1.0, nq, p.hbar() * p.hbar(), p.lambda1 * p.lambda1, p.K1});
      for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
        checks.add("commutator " + to_string(kAllPairs[i]), dyn.pair_residual[i],
                   10 * kAlgebraTol * dscale, true, ctx);
      }
      checks.add("K1 quadratic expansion", dyn.k1_expansion, 10 * kAlgebraTol * dscale,
                 true, ctx);
      checks.add("K2 quadratic expansion", dyn.k2_expansion, 10 * kAlgebraTol * dscale,
                 true, ctx);
      if (p.q().classical()) canonical_limit_checks(checks, p, basis, ctx);

      for (double j1 : cfg.J1_grid)
        for (double j2 : cfg.J2_grid)
          for (double g1 : cfg.gamma1_grid)
            for (double g2 : cfg.gamma2_grid)
              label_checks(checks, cfg, p, CoherentLabel{j1, g1, j2, g2});
    }
  }
  if (checks.failed() > 0) {
    err << "verify: " << checks.failed() << " check(s) failed\n";
  }
  return {{"status", checks.failed() == 0 ? "pass" : "fail"},
          {"failed", checks.failed()},
          {"checks_run", checks.checks().size()},
          {"config", config_to_json(cfg)},
          {"checks", checks.checks()}};
}

int cmd_verify(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
  json summary;
  try {
    summary = verify_suite(cfg, err);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::ofstream file;
  open_or(cfg.output_path, file, out) << summary.dump(2) << '\n';
  return summary["status"] == "pass" ? kExitOk : kExitFailure;
}

int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
  const SweepResult result = run_sweep(cfg, &err);
  std::ofstream file;
  std::ostream& dst = open_or(cfg.output_path, file, out);
  if (cfg.format == OutputFormat::Csv) {
    write_csv(dst, result.records);
  } else {
    write_json(dst, result.records);
  }
  const json summary = sweep_summary(result, cfg);
  if (cfg.output_path.empty()) {
    err << summary.dump(2) << '\n';
  } else {
    std::ofstream s(cfg.output_path + ".summary.json");
    s << summary.dump(2) << '\n';
  }
  err << "sweep: " << result.records.size() << " evaluated, " << result.skipped.size()
      << " skipped, " << summary["violation_count"].get<std::size_t>()
      << " violation witness(es)\n";
  return result.records.empty() ? kExitFailure : kExitOk;
}

int cmd_evolve(const SweepConfig& cfg, const CoherentLabel& label,
               const std::vector<double>& t_grid, std::ostream& out, std::ostream& err) {
  SweepConfig one = cfg;
  one.J1_grid = {label.J1};
  one.J2_grid = {label.J2};
  one.gamma1_grid = {label.gamma1};
  one.gamma2_grid = {label.gamma2};
  one.q_grid = {cfg.q_grid.front()};
  one.theta_grid = {cfg.theta_grid.front()};
  one.t_grid = t_grid;
  const SweepResult result = run_sweep(one, &err);
  if (result.records.empty()) {
    err << "evolve: no point could be evaluated\n";
    return kExitFailure;
  }

  namespace fs = std::filesystem;
  const fs::path dir = cfg.output_path.empty() ? fs::path("evolve_out") : fs::path(cfg.output_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());

  auto series = [&](const std::string& name, auto value) {
    std::ofstream f(dir / (name + ".dat"));
    f << "# t " << name << '\n';
    for (const SweepRecord& r : result.records) {
      f << format_double(r.point.t) << ' ' << format_double(value(r)) << '\n';
    }
  };
  series("chi1", [](const SweepRecord& r) { return r.analysis.variances.chi1; });
  series("chi2", [](const SweepRecord& r) { return r.analysis.variances.chi2; });
  series("kappa1", [](const SweepRecord& r) { return r.analysis.variances.kappa1; });
  series("kappa2", [](const SweepRecord& r) { return r.analysis.variances.kappa2; });
  series("gamma1", [](const SweepRecord& r) { return r.label.gamma1; });
  series("gamma2", [](const SweepRecord& r) { return r.label.gamma2; });
  for (std::size_t i = 0; i < kAllPairs.size(); ++i) {
    const std::string pair = to_string(kAllPairs[i]);
    series("lhs_" + pair, [i](const SweepRecord& r) { return r.analysis.gur[i].lhs; });
    series("rhs_" + pair, [i](const SweepRecord& r) { return r.analysis.gur[i].rhs; });
    series("ratio_" + pair, [i](const SweepRecord& r) { return r.analysis.gur[i].ratio; });
  }
  series("min_ratio", [](const SweepRecord& r) { return r.analysis.min_ratio; });

  if (cfg.format == OutputFormat::Csv) {
    std::ofstream f(dir / "timeseries.csv");
    write_csv(f, result.records);
  } else {
    std::ofstream f(dir / "timeseries.json");
    write_json(f, result.records);
  }
  out << "evolve: wrote " << result.records.size() << " time points to " << dir.string()
      << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-deformed bi-coherent states: verification, sweeps and evolution"};
  app.require_subcommand(1);

  std::string config_path, out_path, format, cutoff, convention;
  std::optional<double> tol;
  std::optional<std::size_t> workers;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_path, "output path");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--cutoff", cutoff, "N | auto");
    sub->add_option("--convention", convention, "spectral-gap | paper-literal")
        ->check(CLI::IsMember({"spectral-gap", "paper-literal"}));
    sub->add_option("--tol", tol, "GUR tolerance");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)");
  };
  CLI::App* verify = app.add_subcommand("verify", "run the identity and oracle suites");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate the configured grid");
  CLI::App* evolve = app.add_subcommand("evolve", "time series for the first label");
  for (CLI::App* sub : {verify, sweep, evolve}) add_flags(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  SweepConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    json overrides = json::object();
    if (!out_path.empty()) overrides["output_path"] = out_path;
    if (!format.empty()) overrides["format"] = format;
    if (!convention.empty()) overrides["convention"] = convention;
    if (tol) overrides["tol"] = *tol;
    if (workers) overrides["workers"] = *workers;
    if (!cutoff.empty()) {
      if (cutoff == "auto") {
        overrides["cutoff"] = "auto";
      } else {
        std::size_t pos = 0;
        long long n = -1;
        try {
          n = std::stoll(cutoff, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != cutoff.size()) throw ConfigError("--cutoff must be an integer or auto");
        overrides["cutoff"] = n;
      }
    }
    if (!overrides.empty()) {
      json merged = config_to_json(cfg);
      merged.update(overrides);
      cfg = parse_config(merged);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (verify->parsed()) return cmd_verify(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
    const CoherentLabel label{cfg.J1_grid.front(), cfg.gamma1_grid.front(),
                              cfg.J2_grid.front(), cfg.gamma2_grid.front()};
    return cmd_evolve(cfg, label, cfg.t_grid, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace qbicoh
