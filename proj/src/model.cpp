#include "model.hpp"

#include "error.hpp"

namespace ipdyn {

std::string InteractionSet::slug() const {
  std::string s;
  for (const auto& [on, tag] : {std::pair{wri, "wri"}, {lpri, "lpri"}, {err, "err"}}) {
    if (!on) continue;
    if (!s.empty()) s += "_";
    s += tag;
  }
  return s.empty() ? "none" : s;
}

BuiltModel build_model(const PanelDataset& raw, const ModelConfig& cfg,
                       const InteractionSet& interactions,
                       const std::map<std::string, double>& wri_values,
                       const std::map<std::string, double>& lpri_values,
                       const std::map<std::string, double>& err_values) {
  if (cfg.dependent.empty()) throw_invalid("model needs a dependent variable");
  BuiltModel m{raw, {}, {}, {}, {}};

  const Series lagged = m.data.lag(cfg.dependent, 1);
  m.lag_name = lagged.name();
  m.data = m.data.with_column(lagged);
  const Series dep_level = m.data.series(cfg.dependent);
  const Series lag_level = m.data.series(m.lag_name);

  m.gmm.dependent = cfg.dependent;
  m.gmm.endogenous.push_back(m.lag_name);
  m.gmm.instrument_source[m.lag_name] = cfg.dependent;

  struct Source {
    bool on;
    const char* tag;
    const std::map<std::string, double>* values;
  };
  std::vector<std::string> interaction_order;
  for (const auto& [on, tag, values] : {Source{interactions.wri, "wri", &wri_values},
                                        Source{interactions.lpri, "lpri", &lpri_values},
                                        Source{interactions.err, "err", &err_values}}) {
    if (!on) continue;
    if (values->empty())
      throw_invalid(std::string("interaction with ") + tag + " requested but no unit has a " +
                    tag + " value");
    const std::string name = m.lag_name + "_x_" + tag;
    const std::string source = cfg.dependent + "_x_" + tag;
    m.data = m.data.with_column(interact(lag_level, *values, name));
    m.data = m.data.with_column(interact(dep_level, *values, source));
    m.gmm.endogenous.push_back(name);
    m.gmm.instrument_source[name] = source;
    m.interaction_names[tag] = name;
    interaction_order.push_back(name);
  }
  for (const auto& name : cfg.endogenous) m.gmm.endogenous.push_back(name);
  m.gmm.exogenous = cfg.exogenous;
  m.gmm.time_effects = cfg.time_effects;
  m.gmm.lag_min = cfg.lag_min;
  m.gmm.lag_max = cfg.lag_max;
  m.gmm.collapse = cfg.collapse;
  m.gmm.steps = cfg.steps;
  m.gmm.windmeijer = cfg.windmeijer;

  m.fe.dependent = cfg.dependent;
  m.fe.regressors.push_back(m.lag_name);
  for (const auto& name : interaction_order) m.fe.regressors.push_back(name);
  for (const auto& name : cfg.endogenous) m.fe.regressors.push_back(name);
  for (const auto& name : cfg.exogenous) m.fe.regressors.push_back(name);
  m.fe.unit_effects = true;
  m.fe.time_effects = cfg.time_effects;
  return m;
}

}  // namespace ipdyn
