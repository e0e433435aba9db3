#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "estimation.hpp"
#include "panel.hpp"

namespace ipdyn {

struct FeSpec {
  std::string dependent;
  std::vector<std::string> regressors;
  bool unit_effects = true;
  bool time_effects = true;
  // clustering is by unit; the panel key is the only grouping the data model has
};

// OLS on the regression augmented with explicit unit/year dummies (exact on
// unbalanced panels), cluster-robust by unit. Reported coefficients are the
// named regressors plus "Constant"; r_squared is the within variant.
EstimationResult fit_fe(const PanelDataset& data, const FeSpec& spec);

// Sandwich with per-cluster score aggregation and small-sample factor
// G/(G-1) * (N-1)/(N-K). bread = (X'X)^{-1}.
Eigen::MatrixXd cluster_robust_covariance(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& residuals,
                                          const std::vector<int>& cluster_ids,
                                          const Eigen::MatrixXd& bread);

}  // namespace ipdyn
