#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qbicoh/cli.hpp"
#include "qbicoh/errors.hpp"
#include "qbicoh/sweep.hpp"
#include "support.hpp"

using namespace qbicoh;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qbicoh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qbicoh_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = scratch(name);
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double col(const std::vector<std::vector<std::string>>& rows, std::size_t r,
           const std::string& name) {
  const auto& h = rows.front();
  const auto it = std::find(h.begin(), h.end(), name);
  REQUIRE(it != h.end());
  return std::strtod(rows[r][static_cast<std::size_t>(it - h.begin())].c_str(), nullptr);
}

}  // namespace

TEST_CASE("linspace and grid parsing") {
  const auto g = linspace(-1.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[2] == doctest::Approx(0.0).scale(1.0));
  CHECK(g.back() == 1.0);
  CHECK(linspace(3.0, 9.0, 1) == std::vector<double>{3.0});

  const SweepConfig c = parse_config(json::parse(
      R"({"q_grid": 0.5, "gamma1_grid": {"start": 0, "stop": 1, "num": 3},
          "cutoff": 24, "convention": "paper-literal", "format": "json"})"));
  CHECK(c.q_grid == std::vector<double>{0.5});
  CHECK(c.gamma1_grid.size() == 3);
  CHECK(c.cutoff == std::size_t{24});
  CHECK(c.convention == ExponentConvention::PaperLiteral);
  CHECK(c.format == OutputFormat::Json);
  CHECK(parse_config(config_to_json(c)).gamma1_grid == c.gamma1_grid);

  CHECK_THROWS_AS(parse_config(json::parse(R"({"qgrid": [1]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"q_grid": []})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"q_grid": "x"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"cutoff": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"format": "xml"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"t_grid": {"start": 0, "stop": 1}})")),
                  ConfigError);
}

TEST_CASE("grid expansion order") {
  SweepConfig c;
  c.q_grid = {0.5, 1.0};
  c.t_grid = {0.0, 1.0, 2.0};
  const auto g = expand_grid(c);
  REQUIRE(g.size() == 6);
  CHECK(g[1].t == 1.0);
  CHECK(g[3].q == 1.0);
  CHECK(g[3].t == 0.0);
}

TEST_CASE("verify: default config passes") {
  const Run r = cli({"verify"});
  CHECK(r.code == kExitOk);
  const json s = json::parse(r.out);
  CHECK(s["status"] == "pass");
  CHECK(s["checks_run"].get<int>() > 5);
}

TEST_CASE("verify: deformed config with a fixed cutoff") {
  const fs::path cfg = write_config(
      "verify_deformed.json",
      {{"q_grid", {0.5}}, {"theta_grid", {0.3}}, {"J1_grid", {0.4}}, {"J2_grid", {0.9}},
       {"gamma1_grid", {0.0, 2.0}}, {"gamma2_grid", {-1.0}}, {"t_grid", {0.5}}, {"cutoff", 16}});
  const fs::path out = scratch("verify_summary.json");
  const Run r = cli({"verify", "--config", cfg.string(), "--out", out.string()});
  CHECK(r.code == kExitOk);
  const json s = json::parse(slurp(out));
  CHECK(s["status"] == "pass");
  bool saw_residual = false;
  for (const auto& c : s["checks"]) {
    if (c["name"] == "deformed algebra residual") {
      saw_residual = true;
      CHECK(c["cutoff"] == 16);
      CHECK(c["value"].get<double>() < 1e-12);
    }
  }
  CHECK(saw_residual);
}

TEST_CASE("verify: paper-literal discrepancies are reported, not asserted") {
  const fs::path cfg = write_config(
      "verify_literal.json",
      {{"q_grid", {0.5}}, {"J1_grid", {1.0}}, {"J2_grid", {0.5}}, {"gamma1_grid", {2.0}},
       {"convention", "paper-literal"}});
  const Run r = cli({"verify", "--config", cfg.string()});
  CHECK(r.code == kExitOk);
  const json s = json::parse(r.out);
  bool found = false;
  for (const auto& c : s["checks"]) {
    if (c["name"] == "crosscheck closed form vs matrix") {
      found = true;
      CHECK_FALSE(c["asserted"].get<bool>());
      CHECK(c["value"].get<double>() > 1e-4);
    }
  }
  CHECK(found);
}

TEST_CASE("configuration errors exit with 2") {
  const fs::path beyond = write_config("beyond.json", {{"q_grid", {0.5}}, {"J1_grid", {1.5}}});
  const Run r = cli({"verify", "--config", beyond.string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("domain") != std::string::npos);

  CHECK(cli({"verify", "--config", scratch("missing.json").string()}).code == kExitConfig);
  CHECK(cli({"sweep", "--format", "xml"}).code == kExitConfig);
  CHECK(cli({"sweep", "--cutoff", "abc"}).code == kExitConfig);
  CHECK(cli({"sweep", "--cutoff", "1"}).code == kExitConfig);
  CHECK(cli({"verify", "--bogus"}).code == kExitConfig);
  CHECK(cli({}).code == kExitConfig);
  const fs::path broken = scratch("broken.json");
  std::ofstream(broken) << "{ not json";
  CHECK(cli({"sweep", "--config", broken.string()}).code == kExitConfig);
}

TEST_CASE("sweep: zero phase rows are saturated") {
  const fs::path cfg = write_config(
      "saturated.json", {{"q_grid", {0.5, 0.8, 1.0}}, {"J1_grid", {0.2, 0.6}},
                         {"J2_grid", {0.3}}, {"format", "json"}});
  const fs::path out = scratch("saturated.json.out");
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--out", out.string()}).code == kExitOk);
  const json rows = json::parse(slurp(out));
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row["gur"][1]["saturated"].get<bool>());
    CHECK(row["gur"][2]["saturated"].get<bool>());
  }
  const json summary = json::parse(slurp(out.string() + ".summary.json"));
  CHECK(summary["saturation_points"].size() == 6);
  CHECK(summary["violation_count"] == 0);
}

TEST_CASE("sweep: evolution advances the gamma columns") {
  const fs::path cfg = write_config(
      "evolving.json", {{"q_grid", {0.6}}, {"theta_grid", {0.5}}, {"J1_grid", {0.4}},
                        {"J2_grid", {0.3}}, {"gamma1_grid", {0.1}}, {"gamma2_grid", {-0.2}},
                        {"t_grid", {0.0, 0.5, 3.0}}, {"m", 2.0}});
  const fs::path out = scratch("evolving.csv");
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--out", out.string()}).code == kExitOk);
  const auto rows = read_csv(slurp(out));
  REQUIRE(rows.size() == 4);
  const ModelParams p = test::params(0.6, 0.5, 1.0, 2.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double t = col(rows, r, "t");
    CHECK(col(rows, r, "gamma1") == doctest::Approx(0.1 + p.lambda1 * t / 2.0).epsilon(1e-15));
    CHECK(col(rows, r, "gamma2") == doctest::Approx(-0.2 + p.lambda2 * t / 2.0).epsilon(1e-15));
  }
}

TEST_CASE("sweep: fixed header and byte-identical output") {
  const fs::path cfg = write_config(
      "determinism.json",
      {{"q_grid", {0.5, 0.9}}, {"theta_grid", {0.0, 0.4}}, {"J1_grid", {0.3, 1.0}},
       {"J2_grid", {0.6}}, {"gamma1_grid", {{"start", -3.0}, {"stop", 3.0}, {"num", 4}}},
       {"gamma2_grid", {1.0}}});
  const fs::path a = scratch("det_a.csv"), b = scratch("det_b.csv");
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--out", a.string(), "--workers", "1"}).code ==
          kExitOk);
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--out", b.string(), "--workers", "3"}).code ==
          kExitOk);
  const std::string ta = slurp(a);
  CHECK(ta == slurp(b));
  const std::string header = ta.substr(0, ta.find('\n'));
  CHECK(header ==
        "q,theta,m,omega,hbar,J1,J2,gamma1,gamma2,t,chi1,chi2,kappa1,kappa2,rhs_x1x2,"
        "rhs_x1p1,rhs_x2p2,rhs_p1p2,ratio_x1x2,ratio_x1p1,ratio_x2p2,ratio_p1p2,p1,p2,p3,"
        "p4,min_ratio,violated");
  const auto rows = read_csv(ta);
  CHECK(rows.size() == 33);  // header + 2 * 2 * 2 * 4 points
  CHECK(rows[1][0] == "5.0000000000000000e-01");
}

TEST_CASE("sweep: out-of-domain points are skipped and counted") {
  const fs::path cfg = write_config(
      "skips.json", {{"q_grid", {0.5, 1.0}}, {"J1_grid", {0.5, 1.5}}, {"J2_grid", {0.5}}});
  const fs::path out = scratch("skips.csv");
  const Run r = cli({"sweep", "--config", cfg.string(), "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("skipped") != std::string::npos);
  const json summary = json::parse(slurp(out.string() + ".summary.json"));
  CHECK(summary["points_evaluated"] == 3);
  CHECK(summary["points_skipped"] == 1);
  CHECK(summary["skipped"][0]["J1"] == 1.5);

  const fs::path none = write_config("none.json", {{"q_grid", {0.5}}, {"J1_grid", {2.0}}});
  const Run empty = cli({"sweep", "--config", none.string(), "--out", scratch("none.csv").string()});
  CHECK(empty.code == kExitFailure);
}

TEST_CASE("evolve: plot files and limits") {
  SUBCASE("t = 0 row equals the static report") {
    const fs::path cfg = write_config(
        "evolve_static.json", {{"q_grid", {0.5}}, {"theta_grid", {0.2}}, {"J1_grid", {0.8}},
                               {"J2_grid", {0.6}}, {"gamma1_grid", {0.4}},
                               {"t_grid", {0.0, 1.0, 2.0, 5.0}}});
    const fs::path dir = scratch("evolve_static");
    fs::remove_all(dir);
    REQUIRE(cli({"evolve", "--config", cfg.string(), "--out", dir.string()}).code == kExitOk);
    const auto rows = read_csv(slurp(dir / "timeseries.csv"));
    REQUIRE(rows.size() == 5);
    const auto rep = gur_report(CoherentLabel{0.8, 0.4, 0.6, 0.0}, test::params(0.5, 0.2));
    CHECK(col(rows, 1, "ratio_x1p1") == doctest::Approx(rep[1].ratio).epsilon(1e-15));
    // Products move with time at q < 1.
    double spread = 0.0;
    for (std::size_t r = 2; r < rows.size(); ++r) {
      spread = std::max(spread, std::abs(col(rows, r, "chi1") - col(rows, 1, "chi1")));
    }
    CHECK(spread > 1e-6);
    std::ifstream dat(dir / "ratio_x1p1.dat");
    std::string comment;
    std::getline(dat, comment);
    double t, v;
    dat >> t >> v;
    REQUIRE(static_cast<bool>(dat));
    CHECK(t == 0.0);
    CHECK(v == doctest::Approx(rep[1].ratio).epsilon(1e-15));
  }
  SUBCASE("undeformed coherent states stay saturated") {
    const fs::path cfg = write_config(
        "evolve_canonical.json",
        {{"q_grid", {1.0}}, {"theta_grid", {0.0}}, {"J1_grid", {0.8}}, {"J2_grid", {0.3}},
         {"gamma1_grid", {0.7}}, {"t_grid", {{"start", 0.0}, {"stop", 10.0}, {"num", 11}}}});
    const fs::path dir = scratch("evolve_canonical");
    REQUIRE(cli({"evolve", "--config", cfg.string(), "--out", dir.string()}).code == kExitOk);
    const auto rows = read_csv(slurp(dir / "timeseries.csv"));
    REQUIRE(rows.size() == 12);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      CHECK(std::abs(col(rows, r, "ratio_x1p1") - 1.0) < 1e-10);
      CHECK(std::abs(col(rows, r, "ratio_x2p2") - 1.0) < 1e-10);
    }
  }
}
