#include "dgp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"

namespace ipdyn {

namespace {

constexpr std::uint64_t kUnitStream = 0x10000;
constexpr std::uint64_t kEpsStream = 0x20000;
constexpr std::uint64_t kControlStream = 0x30000;
constexpr std::uint64_t kLambdaStream = 0x40000;

void validate(const DgpParams& p) {
  if (p.n_units < 1 || p.n_periods < 1) throw_invalid("dgp needs n_units >= 1 and n_periods >= 1");
  if (p.burn_in < 0) throw_invalid("burn_in must be >= 0");
  if (p.sigma_eps < 0 || p.sigma_alpha < 0 || p.sigma_lambda < 0)
    throw_invalid("sigma parameters must be nonnegative");
  if (!(p.wri_min >= 0 && p.wri_min <= p.wri_max && p.wri_max <= 6))
    throw_invalid("wri law bounds must satisfy 0 <= wri_min <= wri_max <= 6");
  double prob_sum = 0;
  for (double v : p.regime_probs) {
    if (!(v >= 0)) throw_invalid("regime probabilities must be nonnegative");
    prob_sum += v;
  }
  if (std::abs(prob_sum - 1.0) > 1e-12) throw_invalid("regime probabilities must sum to 1");
  for (const auto& [name, coef] : p.beta)
    if (!p.control_laws.count(name))
      throw_invalid("beta refers to control '" + name + "' with no sampling law");
  for (const auto& [name, law] : p.control_laws) {
    if (name.empty() || name == "inflation" || name == "unit" || name == "year")
      throw_invalid("bad control column name '" + name + "'");
    if (law.sd < 0) throw_invalid("control '" + name + "' has negative sd");
  }
  if (p.lambda_mode == LambdaMode::fixed &&
      static_cast<int>(p.lambda_values.size()) != p.n_periods)
    throw_invalid("fixed lambda needs exactly n_periods values");
  if (!(p.wri_band >= 0)) throw_invalid("wri_band must be >= 0");
  if (!(p.regime_confidence > 0 && p.regime_confidence <= 1))
    throw_invalid("regime_confidence must be in (0, 1]");
}

std::string unit_name(int i, int n_units) {
  int width = 3;
  for (int v = n_units; v >= 1000; v /= 10) ++width;
  std::string digits = std::to_string(i + 1);
  return "c" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

}  // namespace

std::pair<PanelDataset, DgpTruth> generate(const DgpParams& params) {
  validate(params);
  DgpTruth truth;
  truth.params = params;
  for (int y = 0; y < params.n_periods; ++y) truth.years.push_back(params.first_year + y);

  truth.lambda.assign(static_cast<std::size_t>(params.n_periods), 0.0);
  if (params.lambda_mode == LambdaMode::random) {
    Rng rng = Rng::substream(params.seed, kLambdaStream);
    for (auto& v : truth.lambda) v = rng.normal(0.0, params.sigma_lambda);
  } else if (params.lambda_mode == LambdaMode::fixed) {
    truth.lambda = params.lambda_values;
  }

  std::vector<std::string> violators;
  for (int u = 0; u < params.n_units; ++u) {
    truth.units.push_back(unit_name(u, params.n_units));
    Rng rng = Rng::substream(params.seed, kUnitStream + static_cast<std::uint64_t>(u));
    truth.alpha.push_back(rng.normal(0.0, params.sigma_alpha));
    truth.wri.push_back(rng.uniform(params.wri_min, params.wri_max));
    truth.regime.push_back(rng.categorical3(params.regime_probs));
    const double rho = params.rho0 + params.rho1 * truth.wri.back() +
                       params.rho2 * regime_rigidity(truth.regime.back());
    truth.effective_rho.push_back(rho);
    if (!(std::abs(rho) < 1.0)) violators.push_back(truth.units.back());
  }
  if (!violators.empty()) {
    std::string msg = "stationarity violated (|effective rho| >= 1) for:";
    for (const auto& u : violators) msg += " " + u;
    throw_invalid(msg);
  }

  std::vector<std::string> control_names;
  for (const auto& [name, law] : params.control_laws) control_names.push_back(name);
  const int total = params.burn_in + params.n_periods;

  std::vector<PanelDataset::Observation> observations;
  for (int u = 0; u < params.n_units; ++u) {
    std::vector<std::vector<double>> controls(control_names.size());
    {
      Rng rng = Rng::substream(params.seed, kControlStream + static_cast<std::uint64_t>(u));
      for (std::size_t c = 0; c < control_names.size(); ++c) {
        const ControlLaw& law = params.control_laws.at(control_names[c]);
        for (int t = 0; t < total; ++t) controls[c].push_back(rng.normal(law.mean, law.sd));
      }
    }
    Rng eps_rng = Rng::substream(params.seed, kEpsStream + static_cast<std::uint64_t>(u));
    double pi = eps_rng.normal();  // initial state, washed out over the burn-in
    for (int t = 0; t < total; ++t) {
      double drift = truth.alpha[static_cast<std::size_t>(u)];
      if (t >= params.burn_in) drift += truth.lambda[static_cast<std::size_t>(t - params.burn_in)];
      for (std::size_t c = 0; c < control_names.size(); ++c) {
        const auto it = params.beta.find(control_names[c]);
        if (it != params.beta.end()) drift += it->second * controls[c][static_cast<std::size_t>(t)];
      }
      pi = drift + truth.effective_rho[static_cast<std::size_t>(u)] * pi +
           params.sigma_eps * eps_rng.normal();
      if (t < params.burn_in) continue;
      PanelDataset::Observation obs;
      obs.unit = truth.units[static_cast<std::size_t>(u)];
      obs.year = params.first_year + (t - params.burn_in);
      obs.values.push_back(pi);
      for (std::size_t c = 0; c < control_names.size(); ++c)
        obs.values.emplace_back(controls[c][static_cast<std::size_t>(t)]);
      observations.push_back(std::move(obs));
    }
  }

  std::vector<std::string> columns{"inflation"};
  columns.insert(columns.end(), control_names.begin(), control_names.end());
  return {PanelDataset(columns, std::move(observations)), std::move(truth)};
}

InstitutionTable institutions_from_truth(const DgpTruth& truth) {
  std::vector<InstitutionRecord> records;
  for (std::size_t u = 0; u < truth.units.size(); ++u) {
    InstitutionRecord rec;
    rec.unit = truth.units[u];
    rec.wri = wri_with_band(truth.wri[u], truth.params.wri_band);
    RegimeAssignment a;
    a.code = truth.regime[u];
    const double c = truth.params.regime_confidence;
    a.probabilities = {(1 - c) / 2, (1 - c) / 2, (1 - c) / 2};
    a.probabilities[static_cast<std::size_t>(a.code - 1)] = c;
    rec.regime = a;
    records.push_back(std::move(rec));
  }
  return InstitutionTable(std::move(records));
}

PanelDataset inject_missingness(const PanelDataset& data, double rate, Rng& rng) {
  if (!(rate >= 0 && rate < 1)) throw_invalid("missingness rate must be in [0, 1)");
  const auto& index = *data.index();
  std::vector<PanelDataset::Observation> observations;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    PanelDataset::Observation obs;
    obs.unit = index.units[static_cast<std::size_t>(index.rows[r].first)];
    obs.year = index.rows[r].second;
    for (const auto& name : data.column_names()) {
      const Cell& cell = data.column(name)[r];
      const bool blank = rng.uniform() < rate;
      obs.values.push_back(blank ? Cell{} : cell);
    }
    observations.push_back(std::move(obs));
  }
  return PanelDataset(data.column_names(), std::move(observations));
}

void write_truth_csv(std::ostream& out, const DgpTruth& truth) {
  const DgpParams& p = truth.params;
  out << "kind,name,unit,value\n";
  auto param = [&](const std::string& name, const std::string& value) {
    out << "param," << name << ",," << value << '\n';
  };
  param("n_units", std::to_string(p.n_units));
  param("n_periods", std::to_string(p.n_periods));
  param("first_year", std::to_string(p.first_year));
  param("rho0", format_double(p.rho0));
  param("rho1", format_double(p.rho1));
  param("rho2", format_double(p.rho2));
  param("sigma_eps", format_double(p.sigma_eps));
  param("sigma_alpha", format_double(p.sigma_alpha));
  param("sigma_lambda", format_double(p.sigma_lambda));
  param("lambda_mode", p.lambda_mode == LambdaMode::zero
                           ? "zero"
                           : p.lambda_mode == LambdaMode::random ? "random" : "fixed");
  param("wri_min", format_double(p.wri_min));
  param("wri_max", format_double(p.wri_max));
  param("regime_p_fix", format_double(p.regime_probs[0]));
  param("regime_p_intermediate", format_double(p.regime_probs[1]));
  param("regime_p_float", format_double(p.regime_probs[2]));
  param("burn_in", std::to_string(p.burn_in));
  param("seed", std::to_string(p.seed));
  param("wri_band", format_double(p.wri_band));
  param("regime_confidence", format_double(p.regime_confidence));
  for (const auto& [name, coef] : p.beta) param("beta." + name, format_double(coef));
  for (const auto& [name, law] : p.control_laws) {
    param("control." + name + ".mean", format_double(law.mean));
    param("control." + name + ".sd", format_double(law.sd));
  }
  for (std::size_t i = 0; i < truth.years.size(); ++i)
    out << "lambda," << truth.years[i] << ",," << format_double(truth.lambda[i]) << '\n';
  for (std::size_t u = 0; u < truth.units.size(); ++u) {
    out << "alpha,," << truth.units[u] << ',' << format_double(truth.alpha[u]) << '\n';
    out << "wri,," << truth.units[u] << ',' << format_double(truth.wri[u]) << '\n';
    out << "regime,," << truth.units[u] << ',' << truth.regime[u] << '\n';
    out << "effective_rho,," << truth.units[u] << ',' << format_double(truth.effective_rho[u])
        << '\n';
  }
}

void write_truth_csv_file(const std::string& path, const DgpTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  write_truth_csv(out, truth);
  if (!out.good()) throw_io("write failed for '" + path + "'");
}

}  // namespace ipdyn
