#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "doctest.h"
#include "error.hpp"
#include "runner.hpp"

using namespace ipdyn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("ipdyn_runner_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

Config dgp_config(const fs::path& out) {
  Config cfg;
  cfg.set("out", out.string());
  cfg.set("seed", 42L);
  cfg.set("dgp.n_units", 30L);
  cfg.set("dgp.n_periods", 8L);
  cfg.set("dgp.rho0", 0.5);
  cfg.set("dgp.rho1", -0.08);
  cfg.set("dgp.wri_max", 4.0);
  cfg.set("dgp.wri_band", 0.5);
  cfg.set("dgp.regime_confidence", 0.9);
  return cfg;
}

// Generates a panel + institutions pair to feed the downstream commands.
void seed_inputs(const TempDir& dir) { run_dgp(dgp_config(dir.path)); }

}  // namespace

TEST_CASE("model settings resolve from config keys with baseline defaults") {
  Config cfg;
  ModelConfig m = model_from(cfg);
  CHECK(m.dependent == "inflation");
  CHECK(m.exogenous.empty());
  CHECK(m.time_effects);
  CHECK(m.lag_min == 2);
  CHECK(m.lag_max == 4);
  CHECK(m.collapse);
  CHECK(m.steps == GmmSteps::two);
  CHECK(m.windmeijer);

  cfg.set("model.dependent", "pi");
  cfg.set("model.exogenous", "gdp_growth,import_prices");
  cfg.set("model.time_effects", false);
  cfg.set("model.lag_min", 3L);
  cfg.set("model.lag_max", 0L);
  cfg.set("model.collapse", false);
  cfg.set("model.steps", "one");
  cfg.set("model.windmeijer", false);
  m = model_from(cfg);
  CHECK(m.dependent == "pi");
  CHECK(m.exogenous == std::vector<std::string>{"gdp_growth", "import_prices"});
  CHECK_FALSE(m.time_effects);
  CHECK(m.lag_min == 3);
  CHECK(m.lag_max == 0);
  CHECK_FALSE(m.collapse);
  CHECK(m.steps == GmmSteps::one);
  CHECK_FALSE(m.windmeijer);

  cfg.set("model.steps", "three");
  CHECK_THROWS_AS(model_from(cfg), Error);
}

TEST_CASE("interaction tags parse into the specification set") {
  InteractionSet s = interactions_from_tags({"wri", "err"});
  CHECK(s.wri);
  CHECK_FALSE(s.lpri);
  CHECK(s.err);
  CHECK(interactions_from_tags({"none"}).any() == false);
  CHECK(interactions_from_tags({}).any() == false);
  CHECK(interactions_from_tags({"lpri"}).lpri);
  CHECK_THROWS_AS(interactions_from_tags({"wage"}), Error);
}

TEST_CASE("dgp writes its artifact set and reruns byte-identically") {
  TempDir dir("dgp");
  const Config cfg = dgp_config(dir.path);
  run_dgp(cfg);
  for (const char* name :
       {"panel.csv", "truth.csv", "institutions.csv", "report.txt", "config_echo.cfg"})
    CHECK(fs::exists(dir.path / name));

  const auto report = split_lines(read_file(dir.path / "report.txt"));
  CHECK(report[0] == "ipdyn 1.0.0");
  CHECK(report[1] == "command: dgp");
  CHECK(report[2] == "config: config_echo.cfg");
  CHECK(report[3] == "");
  CHECK(report[4] == "Units: 30  Periods: 8  Years: 2013-2020");
  CHECK(report[5].rfind("Effective persistence range: [", 0) == 0);

  // Same config, same bytes -- including the echo.
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(dir.path))
    first[entry.path().filename().string()] = read_file(entry.path());
  run_dgp(cfg);
  for (const auto& [name, content] : first) CHECK(read_file(dir.path / name) == content);

  // Keys cannot be unset; build a bare config without the seed.
  Config bare;
  bare.set("out", dir.path.string());
  try {
    run_dgp(bare);
    FAIL("expected a missing-seed error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("a seed is required for stochastic commands") !=
          std::string::npos);
  }
}

TEST_CASE("config echo omits threads and re-parses to the same entries") {
  TempDir dir("echo");
  Config cfg = dgp_config(dir.path);
  cfg.set("threads", 3L);
  run_dgp(cfg);
  const std::string echoed = read_file(dir.path / "config_echo.cfg");
  CHECK(echoed.find("threads") == std::string::npos);
  const Config reparsed = Config::parse(echoed);
  std::map<std::string, std::string> expected = cfg.entries();
  expected.erase("threads");
  CHECK(reparsed.entries() == expected);
}

TEST_CASE("describe summarizes the generated panel") {
  TempDir inputs("desc_in");
  seed_inputs(inputs);
  TempDir out("desc_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  run_describe(cfg);
  for (const char* name :
       {"descriptives.csv", "histogram.csv", "scatter.csv", "volatility.csv", "report.txt",
        "config_echo.cfg"})
    CHECK(fs::exists(out.path / name));

  const auto rows = split_lines(read_file(out.path / "descriptives.csv"));
  REQUIRE(rows.size() == 5);  // header + inflation + three controls
  CHECK(rows[0] == "variable,obs,mean,sd,min,max");
  CHECK(rows[1].rfind("inflation,240,", 0) == 0);  // 30 units x 8 years

  const std::string report = read_file(out.path / "report.txt");
  CHECK(report.rfind("ipdyn 1.0.0\ncommand: describe\n", 0) == 0);
  CHECK(report.find("Units: 30  Rows: 240") != std::string::npos);
  CHECK(report.find("Std.Dev.") != std::string::npos);

  // The sample window trims years before describing.
  cfg.set("sample.last_year", 2016L);
  run_describe(cfg);
  const auto trimmed = split_lines(read_file(out.path / "descriptives.csv"));
  CHECK(trimmed[1].rfind("inflation,120,", 0) == 0);  // 30 units x 4 years

  cfg.set("describe.variables", "no_such_column");
  CHECK_THROWS_AS(run_describe(cfg), Error);
}

TEST_CASE("fit runs the eight-column sweep by default") {
  TempDir inputs("fit_in");
  seed_inputs(inputs);
  TempDir out("fit_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  cfg.set("data.institutions", (inputs.path / "institutions.csv").string());
  run_fit(cfg);
  for (const char* name :
       {"fit_table.txt", "fit_results.csv", "fit_diagnostics.csv", "report.txt",
        "config_echo.cfg"})
    CHECK(fs::exists(out.path / name));

  const std::string table = read_file(out.path / "fit_table.txt");
  for (int c = 1; c <= 8; ++c)
    CHECK(table.find("(" + std::to_string(c) + ")") != std::string::npos);
  CHECK(table.find("(9)") == std::string::npos);
  CHECK(table.find("Dependent variable: inflation") != std::string::npos);
  CHECK(table.find("Lagged inflation * WRI") != std::string::npos);
  CHECK(table.find("Lagged inflation * exchange rate regime") != std::string::npos);
  CHECK(table.find("Hansen test for overid. restrictions (p-value)") != std::string::npos);

  // FE block first, then GMM, interaction sweep inside each.
  const auto results = split_lines(read_file(out.path / "fit_results.csv"));
  CHECK(results[1].rfind("(1),FE,", 0) == 0);
  bool gmm5 = false, fe4 = false;
  for (const std::string& line : results) {
    gmm5 = gmm5 || line.rfind("(5),GMM,", 0) == 0;
    fe4 = fe4 || line.rfind("(4),FE,", 0) == 0;
  }
  CHECK(gmm5);
  CHECK(fe4);

  // R-squared only in the FE half, instruments only in the GMM half.
  const std::string diag = read_file(out.path / "fit_diagnostics.csv");
  CHECK(diag.find("(1),FE,r_squared,") != std::string::npos);
  CHECK(diag.find("(5),GMM,r_squared,") == std::string::npos);
  CHECK(diag.find("(5),GMM,instruments,") != std::string::npos);
  CHECK(diag.find("(1),FE,instruments,") == std::string::npos);
  CHECK(diag.find("(5),GMM,hansen,") != std::string::npos);

  // An explicit interaction list collapses the sweep to one spec per method.
  cfg.set("model.interactions", "wri,err");
  run_fit(cfg);
  const std::string narrow = read_file(out.path / "fit_table.txt");
  CHECK(narrow.find("(2)") != std::string::npos);
  CHECK(narrow.find("(3)") == std::string::npos);
}

TEST_CASE("failed specifications name themselves") {
  TempDir inputs("fitfail_in");
  seed_inputs(inputs);
  TempDir out("fitfail_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  cfg.set("model.interactions", "none");
  cfg.set("model.estimators", "gmm");
  cfg.set("model.lag_min", 10L);
  cfg.set("model.lag_max", 10L);
  try {
    run_fit(cfg);
    FAIL("expected the lag window to be unusable");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.rfind("specification 'GMM none' failed: ", 0) == 0);
    CHECK(what.find("lag window") != std::string::npos);
  }

  cfg.set("model.estimators", "ols");
  CHECK_THROWS_AS(run_fit(cfg), Error);
}

TEST_CASE("simulate writes per-variant draws and is thread-count invariant") {
  TempDir inputs("sim_in");
  seed_inputs(inputs);
  TempDir out("sim_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  cfg.set("data.institutions", (inputs.path / "institutions.csv").string());
  cfg.set("seed", 7L);
  cfg.set("uncertainty.target", "regime");
  cfg.set("uncertainty.reps", 6L);
  cfg.set("threads", 1L);
  run_simulate(cfg);

  const std::vector<std::string> names = {
      "draws_specification_wri_and_err.csv", "draws_specification_wri_not_included.csv",
      "simulation_table.txt", "simulation_summary.csv", "report.txt", "config_echo.cfg"};
  std::map<std::string, std::string> first;
  for (const std::string& name : names) {
    CHECK(fs::exists(out.path / name));
    first[name] = read_file(out.path / name);
  }

  const std::string& table = first.at("simulation_table.txt");
  CHECK(table.rfind("Simulated results for exchange rate regime", 0) == 0);
  CHECK(table.find("Specification - WRI and ERR") != std::string::npos);
  CHECK(table.find("Specification - WRI not included") != std::string::npos);
  CHECK(table.find("Mean of coefficients") != std::string::npos);
  CHECK(first.at("report.txt").find("6/6 draws converged") != std::string::npos);

  // Same directory, more threads: every artifact byte-identical.
  cfg.set("threads", 3L);
  run_simulate(cfg);
  for (const std::string& name : names) CHECK(read_file(out.path / name) == first.at(name));
}

TEST_CASE("wri target produces the three canonical scenarios") {
  TempDir inputs("simw_in");
  seed_inputs(inputs);
  TempDir out("simw_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  cfg.set("data.institutions", (inputs.path / "institutions.csv").string());
  cfg.set("seed", 11L);
  cfg.set("uncertainty.reps", 4L);
  run_simulate(cfg);  // default target: wri

  const std::string table = read_file(out.path / "simulation_table.txt");
  CHECK(table.rfind("Simulated results for wage rigidity index", 0) == 0);
  CHECK(table.find("Uniform distribution") != std::string::npos);
  CHECK(table.find("Normal distribution") != std::string::npos);
  CHECK(table.find("ERR variable excluded") != std::string::npos);
  CHECK(fs::exists(out.path / "draws_uniform_distribution.csv"));
  CHECK(fs::exists(out.path / "draws_normal_distribution.csv"));
  CHECK(fs::exists(out.path / "draws_err_variable_excluded.csv"));

  const auto summary = split_lines(read_file(out.path / "simulation_summary.csv"));
  CHECK(summary[0] == "scenario,field,value");
  CHECK(summary.size() == 1 + 3 * 16);

  cfg.set("uncertainty.target", "index");
  CHECK_THROWS_AS(run_simulate(cfg), Error);
}

TEST_CASE("indices validates and republishes the institution table") {
  TempDir inputs("idx_in");
  seed_inputs(inputs);
  TempDir out("idx_out");

  Config cfg;
  cfg.set("out", out.path.string());
  cfg.set("data.institutions", (inputs.path / "institutions.csv").string());
  run_indices(cfg);
  CHECK(fs::exists(out.path / "indices.csv"));
  const std::string report = read_file(out.path / "report.txt");
  CHECK(report.find("Units: 30") != std::string::npos);
  CHECK(report.find("With WRI: 30") != std::string::npos);
  CHECK(report.find("With LPRI: 0") != std::string::npos);
  CHECK(report.find("With regime: 30") != std::string::npos);
  CHECK(report.find("Validation: ok") != std::string::npos);

  // The republished table parses back to the same institutions.
  CHECK(read_file(out.path / "indices.csv") == read_file(inputs.path / "institutions.csv"));
}

TEST_CASE("dispatch and input validation") {
  Config cfg;
  CHECK_THROWS_AS(run_command("transmogrify", cfg), Error);

  TempDir out("disp_out");
  cfg.set("out", out.path.string());
  try {
    run_fit(cfg);
    FAIL("expected a missing-panel error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("config key 'data.panel' is required") != std::string::npos);
  }

  TempDir inputs("disp_in");
  seed_inputs(inputs);
  cfg.set("data.panel", (inputs.path / "panel.csv").string());
  cfg.set("sample.first_year", 2020L);
  cfg.set("sample.last_year", 2015L);
  CHECK_THROWS_AS(run_describe(cfg), Error);

  Config bad_threads = dgp_config(out.path);
  bad_threads.set("data.panel", (inputs.path / "panel.csv").string());
  bad_threads.set("data.institutions", (inputs.path / "institutions.csv").string());
  bad_threads.set("threads", 0L);
  CHECK_THROWS_AS(run_simulate(bad_threads), Error);
}
