#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "indices.hpp"
#include "panel.hpp"
#include "rng.hpp"

namespace ipdyn {

enum class LambdaMode { zero, random, fixed };

struct ControlLaw {
  double mean = 0.0;
  double sd = 1.0;  // iid normal draws
};

struct DgpParams {
  int n_units = 100;
  int n_periods = 12;
  int first_year = 2013;
  double rho0 = 0.5, rho1 = 0.0, rho2 = 0.0;
  std::map<std::string, double> beta;             // per control column
  std::map<std::string, ControlLaw> control_laws;  // must cover every beta key
  double sigma_eps = 1.0;
  double sigma_alpha = 1.0;
  LambdaMode lambda_mode = LambdaMode::zero;
  double sigma_lambda = 0.5;            // lambda_mode == random
  std::vector<double> lambda_values;    // lambda_mode == fixed, one per kept period
  double wri_min = 0.0, wri_max = 6.0;  // WRI_i ~ uniform on [wri_min, wri_max]
  std::array<double, 3> regime_probs{1.0 / 3, 1.0 / 3, 1.0 / 3};
  int burn_in = 50;
  std::uint64_t seed = 1;
  // Metadata attached when exporting an institutions table for the simulator.
  double wri_band = 0.0;
  double regime_confidence = 1.0;  // probability mass on the realized code
};

struct DgpTruth {
  DgpParams params;
  std::vector<std::string> units;
  std::vector<double> alpha;
  std::vector<double> wri;
  std::vector<int> regime;
  std::vector<double> effective_rho;  // rho0 + rho1*wri + rho2*rigidity(regime)
  std::vector<int> years;
  std::vector<double> lambda;  // aligned with years
};

// Forward recursion of the interaction model with per-unit effects, indices and
// regimes; burn_in periods are discarded, the last n_periods are kept and
// labeled first_year onward. Columns: "inflation" plus one per control law.
std::pair<PanelDataset, DgpTruth> generate(const DgpParams& params);

// Institutions table carrying the realized indices/regimes plus the configured
// band and classification-confidence metadata.
InstitutionTable institutions_from_truth(const DgpTruth& truth);

PanelDataset inject_missingness(const PanelDataset& data, double rate, Rng& rng);

void write_truth_csv(std::ostream& out, const DgpTruth& truth);
void write_truth_csv_file(const std::string& path, const DgpTruth& truth);

}  // namespace ipdyn
