#include "runner.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "csv.hpp"
#include "dgp.hpp"
#include "error.hpp"
#include "fe.hpp"
#include "gmm.hpp"
#include "indices.hpp"
#include "model.hpp"
#include "report.hpp"
#include "sim.hpp"
#include "version.hpp"

namespace ipdyn {

namespace {

namespace fs = std::filesystem;

fs::path ensure_out_dir(const Config& cfg) {
  const fs::path dir = cfg.get_string("out", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out.flush()) throw_io("failed writing '" + path.string() + "'");
}

template <typename Fn>
void write_csv(const fs::path& dir, const std::string& name, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_file(dir, name, buf.str());
}

// The echo omits the `threads` key: it is a parallelism hint that never
// affects results, and leaving it out keeps every output file byte-identical
// across thread counts.
std::string config_echo_text(const Config& cfg) {
  std::string out;
  for (const auto& [key, value] : cfg.entries()) {
    if (key == "threads") continue;
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::string metadata_block(const std::string& command) {
  std::string s = "ipdyn ";
  s += kVersion;
  s += "\ncommand: ";
  s += command;
  s += "\nconfig: config_echo.cfg\n\n";
  return s;
}

std::uint64_t required_seed(const Config& cfg) {
  const auto v = cfg.get("seed");
  if (!v)
    throw_invalid("a seed is required for stochastic commands: set `seed = <integer>` or pass "
                  "--seed");
  errno = 0;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0' || errno == ERANGE || v->front() == '-')
    throw_parse("config key 'seed': expected an unsigned integer, got '" + *v + "'");
  return s;
}

unsigned thread_count(const Config& cfg) {
  const long t = cfg.get_long("threads", 1);
  if (t < 1) throw_invalid("threads must be >= 1");
  return static_cast<unsigned>(t);
}

PanelDataset load_panel(const Config& cfg) {
  const auto path = cfg.get("data.panel");
  if (!path) throw_invalid("config key 'data.panel' is required for this command");
  const PanelDataset panel = read_panel_csv_file(*path);
  const int first = static_cast<int>(cfg.get_long("sample.first_year", 2013));
  const int last = static_cast<int>(cfg.get_long("sample.last_year", 2024));
  if (first > last) throw_invalid("sample.first_year must be <= sample.last_year");
  return panel.restrict_years(first, last);
}

InstitutionTable load_institutions(const Config& cfg) {
  const auto path = cfg.get("data.institutions");
  if (!path) throw_invalid("config key 'data.institutions' is required for this command");
  return read_institutions_csv_file(*path);
}

}  // namespace

ModelConfig model_from(const Config& cfg) {
  ModelConfig m;
  m.dependent = cfg.get_string("model.dependent", "inflation");
  m.exogenous = cfg.get_list("model.exogenous", {});
  m.endogenous = cfg.get_list("model.endogenous", {});
  m.time_effects = cfg.get_bool("model.time_effects", true);
  m.lag_min = static_cast<int>(cfg.get_long("model.lag_min", 2));
  m.lag_max = static_cast<int>(cfg.get_long("model.lag_max", 4));
  m.collapse = cfg.get_bool("model.collapse", true);
  const std::string steps = cfg.get_string("model.steps", "two");
  if (steps == "one")
    m.steps = GmmSteps::one;
  else if (steps == "two")
    m.steps = GmmSteps::two;
  else
    throw_invalid("model.steps must be 'one' or 'two', got '" + steps + "'");
  m.windmeijer = cfg.get_bool("model.windmeijer", true);
  return m;
}

InteractionSet interactions_from_tags(const std::vector<std::string>& tags) {
  InteractionSet set;
  for (const std::string& tag : tags) {
    if (tag == "none")
      continue;
    else if (tag == "wri")
      set.wri = true;
    else if (tag == "lpri")
      set.lpri = true;
    else if (tag == "err")
      set.err = true;
    else
      throw_invalid("unknown interaction '" + tag + "' (expected wri, lpri, err or none)");
  }
  return set;
}

namespace {

std::string slugify(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

}  // namespace

void run_describe(const Config& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const PanelDataset panel = load_panel(cfg);
  const std::vector<std::string> variables =
      cfg.get_list("describe.variables", panel.column_names());
  for (const std::string& v : variables)
    if (!panel.has_column(v)) throw_invalid("describe.variables: no column named '" + v + "'");
  if (variables.empty()) throw_invalid("the panel has no data columns to describe");

  const std::string dependent = cfg.get_string("model.dependent", "inflation");
  const std::string fallback = panel.has_column(dependent) ? dependent : variables.front();
  const std::string hist_col = cfg.get_string("describe.histogram_column", fallback);
  const double hist_width = cfg.get_double("describe.histogram_width", 1.0);
  const std::string vol_col = cfg.get_string("describe.volatility_column", fallback);
  const std::string scatter_y = cfg.get_string("describe.scatter_y", fallback);
  std::string scatter_x_default = scatter_y;
  for (const std::string& v : variables)
    if (v != scatter_y) {
      scatter_x_default = v;
      break;
    }
  const std::string scatter_x = cfg.get_string("describe.scatter_x", scatter_x_default);
  for (const std::string& c : {hist_col, vol_col, scatter_x, scatter_y})
    if (!panel.has_column(c)) throw_invalid("describe: no column named '" + c + "'");

  const std::vector<DescriptiveRow> rows = panel.describe(variables);
  const VolatilityProfile volatility = panel.volatility_profile(vol_col);

  write_csv(dir, "descriptives.csv", [&](std::ostream& o) { write_descriptives_csv(o, rows); });
  write_csv(dir, "histogram.csv", [&](std::ostream& o) {
    write_histogram_csv(o, panel.histogram(hist_col, hist_width));
  });
  write_csv(dir, "scatter.csv", [&](std::ostream& o) {
    write_scatter_csv(o, scatter_x, scatter_y, panel.scatter_pairs(scatter_x, scatter_y));
  });
  write_csv(dir, "volatility.csv",
            [&](std::ostream& o) { write_volatility_csv(o, {volatility}); });

  std::string report = metadata_block("describe");
  report += "Units: " + std::to_string(panel.n_units()) +
            "  Rows: " + std::to_string(panel.n_rows()) + "\n\n";
  report += "Descriptive characteristics\n\n";
  report += render_descriptives_table(rows);
  report += "\nVolatility of " + vol_col + ": ";
  if (volatility.omitted.empty()) {
    report += "all units have at least two observed changes\n";
  } else {
    report += "omitted units with fewer than two observed changes:";
    for (const std::string& u : volatility.omitted) report += " " + u;
    report += "\n";
  }
  write_file(dir, "report.txt", report);
  write_file(dir, "config_echo.cfg", config_echo_text(cfg));
}

void run_fit(const Config& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const PanelDataset panel = load_panel(cfg);
  const ModelConfig mcfg = model_from(cfg);

  const std::vector<std::string> estimators = cfg.get_list("model.estimators", {"fe", "gmm"});
  bool fe_on = false, gmm_on = false;
  for (const std::string& e : estimators) {
    if (e == "fe")
      fe_on = true;
    else if (e == "gmm")
      gmm_on = true;
    else
      throw_invalid("model.estimators entries must be 'fe' or 'gmm', got '" + e + "'");
  }

  // Default is the four-specification sweep of the baseline table: no
  // interactions, WRI only, ERR only, both.
  std::vector<InteractionSet> specs;
  if (cfg.has("model.interactions")) {
    specs.push_back(interactions_from_tags(cfg.get_list("model.interactions", {})));
  } else {
    specs.push_back({});
    specs.push_back({.wri = true});
    specs.push_back({.err = true});
    specs.push_back({.wri = true, .err = true});
  }

  std::optional<InstitutionTable> institutions;
  if (std::any_of(specs.begin(), specs.end(), [](const InteractionSet& s) { return s.any(); }))
    institutions = load_institutions(cfg);
  const std::map<std::string, double> wri = institutions ? institutions->wri_points()
                                                         : std::map<std::string, double>{};
  const std::map<std::string, double> lpri = institutions ? institutions->lpri_points()
                                                          : std::map<std::string, double>{};
  const std::map<std::string, double> err = institutions ? institutions->err_values()
                                                         : std::map<std::string, double>{};

  std::vector<FitColumn> columns;
  std::vector<std::string> warnings;
  auto fit_family = [&](const std::string& method) {
    for (const InteractionSet& set : specs) {
      const BuiltModel m = build_model(panel, mcfg, set, wri, lpri, err);
      const std::string header = "(" + std::to_string(columns.size() + 1) + ")";
      try {
        EstimationResult result =
            method == "FE" ? fit_fe(m.data, m.fe) : fit_gmm(m.data, m.gmm);
        for (const std::string& w : result.warnings)
          warnings.push_back(header + " " + method + " " + set.slug() + ": " + w);
        columns.push_back({header, method, std::move(result)});
      } catch (const Error& e) {
        throw Error(e.code(),
                    "specification '" + method + " " + set.slug() + "' failed: " + e.what());
      }
    }
  };
  if (fe_on) fit_family("FE");
  if (gmm_on) fit_family("GMM");
  if (columns.empty()) throw_invalid("model.estimators selected no estimator");

  FitTableOptions options;
  options.dependent = mcfg.dependent;
  options.title = "Estimation results";
  const std::string table = render_fit_table(columns, options);

  write_file(dir, "fit_table.txt", table);
  write_csv(dir, "fit_results.csv", [&](std::ostream& o) { write_fit_results_csv(o, columns); });
  write_csv(dir, "fit_diagnostics.csv",
            [&](std::ostream& o) { write_fit_diagnostics_csv(o, columns); });

  std::string report = metadata_block("fit");
  report += table;
  if (!warnings.empty()) {
    report += "\nWarnings:\n";
    for (const std::string& w : warnings) report += "  " + w + "\n";
  }
  write_file(dir, "report.txt", report);
  write_file(dir, "config_echo.cfg", config_echo_text(cfg));
}

void run_simulate(const Config& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const PanelDataset panel = load_panel(cfg);
  const InstitutionTable institutions = load_institutions(cfg);
  const ModelConfig mcfg = model_from(cfg);

  const std::string target_key = cfg.get_string("uncertainty.target", "wri");
  PerturbTarget target;
  if (target_key == "wri")
    target = PerturbTarget::wri;
  else if (target_key == "lpri")
    target = PerturbTarget::lpri;
  else if (target_key == "regime")
    target = PerturbTarget::regime;
  else if (target_key == "both")
    target = PerturbTarget::both;
  else
    throw_invalid("uncertainty.target must be wri, lpri, regime or both, got '" + target_key +
                  "'");

  UncertaintySpec base;
  base.target = target;
  base.reps = static_cast<int>(cfg.get_long("uncertainty.reps", 500));
  base.seed = required_seed(cfg);
  base.significance_level = cfg.get_double("uncertainty.significance", 0.05);
  base.track = cfg.get_string("uncertainty.track", "");
  base.threads = thread_count(cfg);
  const std::string dist_key = cfg.get_string("uncertainty.distribution", "uniform");
  BandDistribution cfg_dist;
  if (dist_key == "uniform")
    cfg_dist = BandDistribution::uniform;
  else if (dist_key == "normal")
    cfg_dist = BandDistribution::normal;
  else
    throw_invalid("uncertainty.distribution must be 'uniform' or 'normal', got '" + dist_key +
                  "'");

  struct Variant {
    std::string header;
    InteractionSet set;
    BandDistribution dist;
  };
  std::vector<Variant> variants;
  std::string title;
  switch (target) {
    case PerturbTarget::wri:
      title = "Simulated results for wage rigidity index";
      variants = {{"Uniform distribution", {.wri = true, .err = true}, BandDistribution::uniform},
                  {"Normal distribution", {.wri = true, .err = true}, BandDistribution::normal},
                  {"ERR variable excluded", {.wri = true}, BandDistribution::uniform}};
      break;
    case PerturbTarget::lpri:
      title = "Simulated results for labour protection rigidity index";
      variants = {{"Uniform distribution", {.lpri = true, .err = true}, BandDistribution::uniform},
                  {"Normal distribution", {.lpri = true, .err = true}, BandDistribution::normal},
                  {"ERR variable excluded", {.lpri = true}, BandDistribution::uniform}};
      break;
    case PerturbTarget::regime:
      title = "Simulated results for exchange rate regime";
      variants = {
          {"Specification - WRI and ERR", {.wri = true, .err = true}, BandDistribution::uniform},
          {"Specification - WRI not included", {.err = true}, BandDistribution::uniform}};
      break;
    case PerturbTarget::both:
      title = "Simulated results for joint WRI and regime perturbation";
      variants = {{"WRI and ERR jointly perturbed", {.wri = true, .err = true}, cfg_dist}};
      break;
  }

  std::vector<SimulationColumn> columns;
  std::vector<std::string> convergence_lines;
  for (const Variant& variant : variants) {
    UncertaintySpec spec = base;
    spec.distribution = variant.dist;
    auto [summary, draws] = run_uncertainty(panel, institutions, mcfg, variant.set, spec);
    write_csv(dir, "draws_" + slugify(variant.header) + ".csv",
              [&](std::ostream& o) { write_draws_csv(o, draws); });
    convergence_lines.push_back(variant.header + ": " + std::to_string(summary.converged) + "/" +
                                std::to_string(summary.reps) + " draws converged");
    columns.push_back({variant.header, summary});
  }

  const std::string table = render_simulation_table(columns, title);
  write_file(dir, "simulation_table.txt", table);
  write_csv(dir, "simulation_summary.csv",
            [&](std::ostream& o) { write_simulation_summary_csv(o, columns); });

  std::string report = metadata_block("simulate");
  report += table;
  report += "\n";
  for (const std::string& line : convergence_lines) report += line + "\n";
  write_file(dir, "report.txt", report);
  write_file(dir, "config_echo.cfg", config_echo_text(cfg));
}

void run_dgp(const Config& cfg) {
  const fs::path dir = ensure_out_dir(cfg);

  DgpParams p;
  p.n_units = static_cast<int>(cfg.get_long("dgp.n_units", 100));
  p.n_periods = static_cast<int>(cfg.get_long("dgp.n_periods", 12));
  p.first_year = static_cast<int>(cfg.get_long("dgp.first_year", 2013));
  p.rho0 = cfg.get_double("dgp.rho0", 0.5);
  p.rho1 = cfg.get_double("dgp.rho1", 0.0);
  p.rho2 = cfg.get_double("dgp.rho2", 0.0);
  p.sigma_eps = cfg.get_double("dgp.sigma_eps", 1.0);
  p.sigma_alpha = cfg.get_double("dgp.sigma_alpha", 1.0);
  const std::string lambda = cfg.get_string("dgp.lambda_mode", "zero");
  if (lambda == "zero")
    p.lambda_mode = LambdaMode::zero;
  else if (lambda == "random")
    p.lambda_mode = LambdaMode::random;
  else if (lambda == "fixed")
    p.lambda_mode = LambdaMode::fixed;
  else
    throw_invalid("dgp.lambda_mode must be zero, random or fixed, got '" + lambda + "'");
  p.sigma_lambda = cfg.get_double("dgp.sigma_lambda", 0.5);
  for (const std::string& v : cfg.get_list("dgp.lambda_values", {}))
    p.lambda_values.push_back(parse_csv_double(v, "dgp.lambda_values", 0, "value"));
  p.wri_min = cfg.get_double("dgp.wri_min", 0.0);
  p.wri_max = cfg.get_double("dgp.wri_max", 6.0);
  const std::vector<std::string> probs = cfg.get_list("dgp.regime_probs", {});
  if (!probs.empty()) {
    if (probs.size() != 3) throw_invalid("dgp.regime_probs needs exactly three values");
    for (std::size_t i = 0; i < 3; ++i)
      p.regime_probs[i] = parse_csv_double(probs[i], "dgp.regime_probs", 0, "value");
  }
  p.burn_in = static_cast<int>(cfg.get_long("dgp.burn_in", 50));
  p.seed = required_seed(cfg);
  p.wri_band = cfg.get_double("dgp.wri_band", 0.0);
  p.regime_confidence = cfg.get_double("dgp.regime_confidence", 1.0);

  // Default controls echo the dispersion of the observed macro series; they
  // are fixture choices, not estimates.
  std::vector<std::string> controls =
      cfg.get_list("dgp.controls", {"import_prices", "energy_prices", "gdp_growth"});
  if (controls.size() == 1 && controls.front() == "none") controls.clear();
  const std::map<std::string, std::pair<ControlLaw, double>> builtin = {
      {"import_prices", {{0.0, 0.09}, 6.0}},
      {"energy_prices", {{0.0, 0.35}, 6.5}},
      {"gdp_growth", {{2.82, 4.28}, -0.4}},
  };
  for (const std::string& name : controls) {
    ControlLaw law{0.0, 1.0};
    double beta = 1.0;
    if (const auto it = builtin.find(name); it != builtin.end()) {
      law = it->second.first;
      beta = it->second.second;
    }
    law.mean = cfg.get_double("dgp.control." + name + ".mean", law.mean);
    law.sd = cfg.get_double("dgp.control." + name + ".sd", law.sd);
    beta = cfg.get_double("dgp.control." + name + ".beta", beta);
    p.control_laws[name] = law;
    p.beta[name] = beta;
  }

  auto [panel, truth] = generate(p);
  const double missing_rate = cfg.get_double("dgp.missing_rate", 0.0);
  if (missing_rate > 0) {
    Rng rng = Rng::substream(p.seed, 0x50000);
    panel = inject_missingness(panel, missing_rate, rng);
  }

  write_panel_csv_file((dir / "panel.csv").string(), panel);
  write_truth_csv_file((dir / "truth.csv").string(), truth);
  write_institutions_csv_file((dir / "institutions.csv").string(),
                              institutions_from_truth(truth));

  const auto [rho_min, rho_max] =
      std::minmax_element(truth.effective_rho.begin(), truth.effective_rho.end());
  std::string report = metadata_block("dgp");
  report += "Units: " + std::to_string(p.n_units) + "  Periods: " + std::to_string(p.n_periods) +
            "  Years: " + std::to_string(p.first_year) + "-" +
            std::to_string(p.first_year + p.n_periods - 1) + "\n";
  report += "Effective persistence range: [" + format_fixed3(*rho_min) + ", " +
            format_fixed3(*rho_max) + "]\n";
  report += "Files: panel.csv, truth.csv, institutions.csv\n";
  write_file(dir, "report.txt", report);
  write_file(dir, "config_echo.cfg", config_echo_text(cfg));
}

void run_indices(const Config& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const InstitutionTable table = load_institutions(cfg);

  write_institutions_csv_file((dir / "indices.csv").string(), table);

  std::size_t with_wri = 0, with_lpri = 0, with_regime = 0;
  for (const InstitutionRecord& r : table.records()) {
    with_wri += r.wri.has_value();
    with_lpri += r.lpri.has_value();
    with_regime += r.regime.has_value();
  }
  std::string report = metadata_block("indices");
  report += "Units: " + std::to_string(table.size()) + "\n";
  report += "With WRI: " + std::to_string(with_wri) + "\n";
  report += "With LPRI: " + std::to_string(with_lpri) + "\n";
  report += "With regime: " + std::to_string(with_regime) + "\n";
  report += "Validation: ok\n";
  write_file(dir, "report.txt", report);
  write_file(dir, "config_echo.cfg", config_echo_text(cfg));
}

void run_command(const std::string& command, const Config& cfg) {
  if (command == "describe")
    run_describe(cfg);
  else if (command == "fit")
    run_fit(cfg);
  else if (command == "simulate")
    run_simulate(cfg);
  else if (command == "dgp")
    run_dgp(cfg);
  else if (command == "indices")
    run_indices(cfg);
  else
    throw_invalid("unknown command '" + command + "'");
}

}  // namespace ipdyn
