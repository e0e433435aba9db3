#pragma once

#include <map>
#include <string>
#include <vector>

#include "fe.hpp"
#include "gmm.hpp"
#include "panel.hpp"

namespace ipdyn {

// Which institutional interactions enter the specification.
struct InteractionSet {
  bool wri = false;
  bool lpri = false;
  bool err = false;
  bool any() const { return wri || lpri || err; }
  std::string slug() const;  // "none", "wri", "wri_err", ...
};

struct ModelConfig {
  std::string dependent = "inflation";
  std::vector<std::string> exogenous;   // e.g. import/energy price changes
  std::vector<std::string> endogenous;  // additional endogenous controls (GDP growth)
  bool time_effects = true;
  int lag_min = 2;
  int lag_max = 4;
  bool collapse = true;
  GmmSteps steps = GmmSteps::two;
  bool windmeijer = true;
};

// The estimation frame for one specification: the raw panel augmented with the
// lagged dependent, the requested interactions (built from per-unit index
// values), and the current-dated interaction columns that serve as lagged-level
// instrument sources.
struct BuiltModel {
  PanelDataset data;
  FeSpec fe;
  GmmSpec gmm;
  std::string lag_name;                                  // "L.<dependent>"
  std::map<std::string, std::string> interaction_names;  // "wri" -> column name
};

BuiltModel build_model(const PanelDataset& raw, const ModelConfig& cfg,
                       const InteractionSet& interactions,
                       const std::map<std::string, double>& wri_values,
                       const std::map<std::string, double>& lpri_values,
                       const std::map<std::string, double>& err_values);

}  // namespace ipdyn
