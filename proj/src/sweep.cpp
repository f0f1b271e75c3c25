#include "qbicoh/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <variant>

#include "qbicoh/errors.hpp"
#include "qbicoh/states.hpp"

namespace qbicoh {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "q_grid", "theta_grid", "J1_grid", "J2_grid", "gamma1_grid", "gamma2_grid",
      "t_grid", "m", "omega", "hbar", "cutoff", "convention", "tol",
      "output_path", "format", "workers"};
  return keys;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

std::vector<double> parse_grid(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(number(v, key));
  } else if (v.is_array()) {
    for (const auto& x : v) out.push_back(number(x, key));
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items()) {
      if (k != "start" && k != "stop" && k != "num") {
        throw ConfigError("'" + key + "': unknown range key '" + k + "'");
      }
    }
    if (!v.contains("start") || !v.contains("stop") || !v.contains("num")) {
      throw ConfigError("'" + key + "': range needs start, stop and num");
    }
    const json& n = v.at("num");
    if (!n.is_number_integer() || n.get<long long>() < 1) {
      throw ConfigError("'" + key + "': num must be a positive integer");
    }
    out = linspace(number(v.at("start"), key), number(v.at("stop"), key),
                   n.get<std::size_t>());
  } else {
    throw ConfigError("'" + key + "' must be a number, a list or a range object");
  }
  if (out.empty()) throw ConfigError("'" + key + "' is empty");
  return out;
}

json grid_json(const std::vector<double>& g) { return json(g); }

void append_row(std::string& line, double x) {
  if (!line.empty()) line += ',';
  line += format_double(x);
}

}  // namespace

std::vector<double> linspace(double start, double stop, std::size_t num) {
  if (num == 0) throw ConfigError("linspace needs num >= 1");
  std::vector<double> out(num);
  if (num == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(num - 1);
  for (std::size_t i = 0; i < num; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

SweepConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  SweepConfig c;
  auto grid = [&](const char* key, std::vector<double>& dst) {
    if (j.contains(key)) dst = parse_grid(j.at(key), key);
  };
  grid("q_grid", c.q_grid);
  grid("theta_grid", c.theta_grid);
  grid("J1_grid", c.J1_grid);
  grid("J2_grid", c.J2_grid);
  grid("gamma1_grid", c.gamma1_grid);
  grid("gamma2_grid", c.gamma2_grid);
  grid("t_grid", c.t_grid);

  auto positive = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    dst = number(j.at(key), key);
    if (!(dst > 0.0)) throw ConfigError(std::string("'") + key + "' must be positive");
  };
  positive("m", c.m);
  positive("omega", c.omega);
  positive("hbar", c.hbar);
  positive("tol", c.tol);

  if (j.contains("cutoff")) {
    const json& v = j.at("cutoff");
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.cutoff.reset();
    } else if (v.is_number_integer() && v.get<long long>() >= 2) {
      c.cutoff = v.get<std::size_t>();
    } else {
      throw ConfigError("'cutoff' must be \"auto\" or an integer >= 2");
    }
  }
  if (j.contains("convention")) {
    const json& v = j.at("convention");
    if (!v.is_string()) throw ConfigError("'convention' must be a string");
    try {
      c.convention = parse_convention(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string()) throw ConfigError("'output_path' must be a string");
    c.output_path = j.at("output_path").get<std::string>();
  }
  if (j.contains("format")) {
    const json& v = j.at("format");
    const std::string f = v.is_string() ? v.get<std::string>() : "";
    if (f == "csv") {
      c.format = OutputFormat::Csv;
    } else if (f == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw ConfigError("'format' must be \"csv\" or \"json\"");
    }
  }
  if (j.contains("workers")) {
    const json& v = j.at("workers");
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("'workers' must be a non-negative integer");
    }
    c.workers = v.get<std::size_t>();
  }
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const SweepConfig& c) {
  json j;
  j["q_grid"] = grid_json(c.q_grid);
  j["theta_grid"] = grid_json(c.theta_grid);
  j["J1_grid"] = grid_json(c.J1_grid);
  j["J2_grid"] = grid_json(c.J2_grid);
  j["gamma1_grid"] = grid_json(c.gamma1_grid);
  j["gamma2_grid"] = grid_json(c.gamma2_grid);
  j["t_grid"] = grid_json(c.t_grid);
  j["m"] = c.m;
  j["omega"] = c.omega;
  j["hbar"] = c.hbar;
  j["cutoff"] = c.cutoff ? json(*c.cutoff) : json("auto");
  j["convention"] = to_string(c.convention);
  j["tol"] = c.tol;
  j["output_path"] = c.output_path;
  j["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
  j["workers"] = c.workers;
  return j;
}

std::vector<GridPoint> expand_grid(const SweepConfig& c) {
  std::vector<GridPoint> out;
  out.reserve(c.q_grid.size() * c.theta_grid.size() * c.J1_grid.size() *
              c.J2_grid.size() * c.gamma1_grid.size() * c.gamma2_grid.size() *
              c.t_grid.size());
  for (double q : c.q_grid)
    for (double th : c.theta_grid)
      for (double j1 : c.J1_grid)
        for (double j2 : c.J2_grid)
          for (double g1 : c.gamma1_grid)
            for (double g2 : c.gamma2_grid)
              for (double t : c.t_grid) out.push_back({q, th, j1, j2, g1, g2, t});
  return out;
}

SweepRecord evaluate_point(const GridPoint& p, const SweepConfig& cfg) {
  PhysicalInputs in;
  in.m = cfg.m;
  in.omega = cfg.omega;
  in.hbar = cfg.hbar;
  in.theta = p.theta;
  in.q = QValue(p.q);
  in.validate();

  SweepRecord r;
  r.point = p;
  r.params = derive_params(in);
  require_inside_radius(p.J1, in.q, "J1");
  require_inside_radius(p.J2, in.q, "J2");
  r.label = evolve(CoherentLabel{p.J1, p.gamma1, p.J2, p.gamma2}, p.t, r.params);

  GurOptions opts;
  opts.tol = cfg.tol;
  opts.series.convention = cfg.convention;
  if (cfg.cutoff) opts.series.max_cutoff = *cfg.cutoff;
  r.analysis = analyze_point(r.label, r.params, opts);
  return r;
}

SweepResult run_sweep(const SweepConfig& cfg, std::ostream* log) {
  const std::vector<GridPoint> grid = expand_grid(cfg);
  using Outcome = std::variant<std::monostate, SweepRecord, std::string>;
  std::vector<Outcome> outcomes(grid.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        outcomes[i] = evaluate_point(grid[i], cfg);
      } catch (const DomainError& e) {
        outcomes[i] = std::string("domain: ") + e.what();
      } catch (const CutoffError& e) {
        outcomes[i] = std::string("cutoff: ") + e.what();
      } catch (const InvariantError& e) {
        outcomes[i] = std::string("invariant: ") + e.what();
      } catch (const std::exception& e) {
        outcomes[i] = std::string("error: ") + e.what();
      }
    }
  };

  std::size_t workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(grid.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  SweepResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (auto* rec = std::get_if<SweepRecord>(&outcomes[i])) {
      result.records.push_back(std::move(*rec));
    } else {
      const std::string& why = std::get<std::string>(outcomes[i]);
      if (log) {
        *log << "skipped q=" << grid[i].q << " theta=" << grid[i].theta
             << " J1=" << grid[i].J1 << " J2=" << grid[i].J2 << " gamma1="
             << grid[i].gamma1 << " gamma2=" << grid[i].gamma2 << " t=" << grid[i].t
             << ": " << why << '\n';
      }
      result.skipped.push_back({grid[i], why});
    }
  }
  return result;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "q", "theta", "m", "omega", "hbar", "J1", "J2", "gamma1", "gamma2", "t",
      "chi1", "chi2", "kappa1", "kappa2",
      "rhs_x1x2", "rhs_x1p1", "rhs_x2p2", "rhs_p1p2",
      "ratio_x1x2", "ratio_x1p1", "ratio_x2p2", "ratio_p1p2",
      "p1", "p2", "p3", "p4", "min_ratio", "violated"};
  return cols;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const SweepRecord& r : records) {
    const ModelParams& p = r.params;
    const PointAnalysis& a = r.analysis;
    std::string line;
    for (double x : {r.point.q, p.theta(), p.m(), p.inputs.omega, p.hbar(), r.label.J1,
                     r.label.J2, r.label.gamma1, r.label.gamma2, r.point.t,
                     a.variances.chi1, a.variances.chi2, a.variances.kappa1,
                     a.variances.kappa2, a.rhs.x1x2, a.rhs.x1p1, a.rhs.x2p2, a.rhs.p1p2,
                     a.gur[0].ratio, a.gur[1].ratio, a.gur[2].ratio, a.gur[3].ratio,
                     a.conditions.p1, a.conditions.p2, a.conditions.p3,
                     a.conditions.p4, a.min_ratio}) {
      append_row(line, x);
    }
    line += a.violated ? ",1" : ",0";
    out << line << '\n';
  }
}

json record_to_json(const SweepRecord& r) {
  const PointAnalysis& a = r.analysis;
  json reports = json::array();
  for (const GurReport& g : a.gur) {
    reports.push_back({{"pair", to_string(g.pair)},
                       {"lhs", g.lhs},
                       {"rhs", g.rhs},
                       {"ratio", std::isfinite(g.ratio) ? json(g.ratio) : json("inf")},
                       {"satisfied", g.satisfied},
                       {"saturated", g.saturated}});
  }
  return {{"q", r.point.q},
          {"theta", r.params.theta()},
          {"m", r.params.m()},
          {"omega", r.params.inputs.omega},
          {"hbar", r.params.hbar()},
          {"J1", r.label.J1},
          {"J2", r.label.J2},
          {"gamma1", r.label.gamma1},
          {"gamma2", r.label.gamma2},
          {"gamma1_initial", r.point.gamma1},
          {"gamma2_initial", r.point.gamma2},
          {"t", r.point.t},
          {"variances",
           {{"chi1", a.variances.chi1},
            {"chi2", a.variances.chi2},
            {"kappa1", a.variances.kappa1},
            {"kappa2", a.variances.kappa2}}},
          {"rhs",
           {{"x1x2", a.rhs.x1x2}, {"x1p1", a.rhs.x1p1}, {"x2p2", a.rhs.x2p2},
            {"p1p2", a.rhs.p1p2}}},
          {"gur", reports},
          {"conditions",
           {{"p1", a.conditions.p1},
            {"p2", a.conditions.p2},
            {"p3", a.conditions.p3},
            {"p4", a.conditions.p4},
            {"reduced1", a.conditions.reduced1},
            {"reduced2", a.conditions.reduced2},
            {"reduced_cross", a.conditions.reduced_cross}}},
          {"min_ratio", std::isfinite(a.min_ratio) ? json(a.min_ratio) : json("inf")},
          {"violated", a.violated}};
}

void write_json(std::ostream& out, const std::vector<SweepRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  out << arr.dump(1) << '\n';
}

json sweep_summary(const SweepResult& result, const SweepConfig& cfg) {
  auto coords = [](const SweepRecord& r) {
    return json{{"q", r.point.q},         {"theta", r.point.theta},
                {"J1", r.label.J1},       {"J2", r.label.J2},
                {"gamma1", r.label.gamma1}, {"gamma2", r.label.gamma2},
                {"t", r.point.t}};
  };
  json saturation = json::array();
  json witnesses = json::array();
  const SweepRecord* worst = nullptr;
  for (const SweepRecord& r : result.records) {
    json pairs = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
      if (r.analysis.gur[i].saturated) pairs.push_back(to_string(r.analysis.gur[i].pair));
    }
    if (!pairs.empty()) {
      json s = coords(r);
      s["pairs"] = pairs;
      saturation.push_back(std::move(s));
    }
    if (r.analysis.min_ratio < 1.0 - kWitnessMargin) {
      json w = coords(r);
      w["min_ratio"] = r.analysis.min_ratio;
      json pairs_violated = json::array();
      for (std::size_t i = 0; i < 4; ++i) {
        if (r.analysis.gur[i].ratio < 1.0 - kWitnessMargin) {
          pairs_violated.push_back(to_string(r.analysis.gur[i].pair));
        }
      }
      w["pairs"] = pairs_violated;
      witnesses.push_back(std::move(w));
    }
    if (!worst || r.analysis.min_ratio < worst->analysis.min_ratio) worst = &r;
  }
  json skipped = json::array();
  for (const SkippedPoint& s : result.skipped) {
    skipped.push_back({{"q", s.point.q},
                       {"theta", s.point.theta},
                       {"J1", s.point.J1},
                       {"J2", s.point.J2},
                       {"gamma1", s.point.gamma1},
                       {"gamma2", s.point.gamma2},
                       {"t", s.point.t},
                       {"reason", s.reason}});
  }
  json summary;
  summary["config"] = config_to_json(cfg);
  summary["points_total"] = result.records.size() + result.skipped.size();
  summary["points_evaluated"] = result.records.size();
  summary["points_skipped"] = result.skipped.size();
  summary["skipped"] = skipped;
  summary["saturation_points"] = saturation;
  summary["violation_witnesses"] = witnesses;
  summary["violation_count"] = witnesses.size();
  if (worst) {
    json w = coords(*worst);
    w["min_ratio"] = worst->analysis.min_ratio;
    summary["min_ratio_point"] = w;
  } else {
    summary["min_ratio_point"] = nullptr;
  }
  return summary;
}

}  // namespace qbicoh
