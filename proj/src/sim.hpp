#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "estimation.hpp"
#include "indices.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace ipdyn {

enum class PerturbTarget { wri, lpri, regime, both };  // both = wri + regime
enum class BandDistribution { uniform, normal };

struct UncertaintySpec {
  PerturbTarget target = PerturbTarget::wri;
  BandDistribution distribution = BandDistribution::uniform;
  int reps = 500;
  std::uint64_t seed = 1;
  double significance_level = 0.05;
  std::string track;  // coefficient to record; default: the perturbed interaction
  unsigned threads = 1;
};

struct DrawRecord {
  int draw_index = 0;  // 1-based
  bool converged = false;
  double coefficient = 0, standard_error = 0, p_value = 0;
  double ar2_p = 0, hansen_p = 0;
  // Perturbed per-unit values, aligned with the institution table's records;
  // NaN / 0 for units or targets that were not perturbed.
  std::vector<double> wri, lpri;
  std::vector<int> regime;
  std::string error;  // failure reason when !converged
};

struct SimulationSummary {
  double baseline_coefficient = 0, baseline_se = 0, baseline_ar2_p = 0, baseline_hansen_p = 0;
  double mean = 0, median = 0, sd = 0;
  double share_positive = 0, share_nonpositive = 0, share_negative_significant = 0;
  double ar2_p_summary = 0, hansen_p_summary = 0;  // medians over converged draws
  long reps = 0, converged = 0, failures = 0;
  double significance_level = 0.05;
};

double draw_index_value(const IndexWithBand& index, BandDistribution distribution, Rng& rng);
int draw_regime(const RegimeAssignment& assignment, Rng& rng);

// Perturbs the targeted institutional inputs per unit, rebuilds the
// interaction columns, and refits the GMM specification once per draw. The
// per-draw RNG substream depends only on (seed, draw index), so results are
// byte-identical under any thread count.
std::pair<SimulationSummary, std::vector<DrawRecord>> run_uncertainty(
    const PanelDataset& raw, const InstitutionTable& institutions, const ModelConfig& model,
    const InteractionSet& interactions, const UncertaintySpec& spec);

SimulationSummary summarize(const std::vector<DrawRecord>& draws, double significance_level);

}  // namespace ipdyn
