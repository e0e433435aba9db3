#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "estimation.hpp"
#include "panel.hpp"

namespace ipdyn {

enum class GmmSteps { one, two };

struct GmmSpec {
  std::string dependent;
  std::vector<std::string> endogenous;  // instrumented by lagged levels
  std::vector<std::string> exogenous;   // self-instrumented by their differences
  bool time_effects = true;
  int lag_min = 2;
  int lag_max = 4;  // <= 0 means unbounded (limited only by the data span)
  bool collapse = true;
  GmmSteps steps = GmmSteps::two;
  bool windmeijer = true;
  // Lag-ℓ instruments for an endogenous regressor are levels of its source
  // column dated t−ℓ from the equation period. The source defaults to the
  // regressor itself; for a regressor that is already a lag (L.y, or an
  // interaction built on L.y) the model layer points it at the current-dated
  // column so that ℓ=2 really is the classic t−2 instrument.
  std::map<std::string, std::string> instrument_source;

  const std::string& source_of(const std::string& endog) const {
    const auto it = instrument_source.find(endog);
    return it == instrument_source.end() ? endog : it->second;
  }
};

struct InstrumentMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd Z;                                            // rows follow `sample`
  std::vector<std::pair<std::string, int>> sample;              // differenced obs (unit, year)
  std::vector<std::pair<std::size_t, std::size_t>> unit_ranges;  // row partition by unit
  std::size_t gmm_column_count = 0;  // lagged-level columns (the rest are IV-style)
};

struct GmmFitDetail {
  std::vector<std::string> coef_names;
  InstrumentMatrix instruments;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::MatrixXd W1, W2;  // W2 always formed from one-step residuals
  Eigen::VectorXd beta1, u1;
  Eigen::MatrixXd A1_pinv, V1_robust;
  Eigen::VectorXd beta2, u2;  // empty when steps == one
  Eigen::MatrixXd A2_pinv, V2_uncorrected, V2_corrected;
  GmmSteps steps = GmmSteps::two;
  bool windmeijer = false;

  const Eigen::VectorXd& beta_final() const { return steps == GmmSteps::two ? beta2 : beta1; }
  const Eigen::VectorXd& u_final() const { return steps == GmmSteps::two ? u2 : u1; }
  const Eigen::MatrixXd& A_final_pinv() const { return steps == GmmSteps::two ? A2_pinv : A1_pinv; }
  const Eigen::MatrixXd& W_final() const { return steps == GmmSteps::two ? W2 : W1; }
  Eigen::MatrixXd vcov_final() const {
    if (steps == GmmSteps::one) return V1_robust;
    return windmeijer ? V2_corrected : V2_uncorrected;
  }
};

// The differenced-equation rows and regressor matrix shared by the instrument
// builder and the fit: rows where the differences of the dependent and of
// every regressor all exist; per-period intercepts appended when time_effects.
InstrumentMatrix build_instruments(const PanelDataset& data, const GmmSpec& spec);

EstimationResult fit_gmm(const PanelDataset& data, const GmmSpec& spec,
                         GmmFitDetail* detail_out = nullptr);

Diagnostic hansen_test(const GmmFitDetail& d);
// Arellano-Bond AR(m) on the chosen step's residuals (final step by default).
Diagnostic ar_test(const GmmFitDetail& d, int m, bool one_step_residuals = false);

}  // namespace ipdyn
