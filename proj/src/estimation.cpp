#include "estimation.hpp"

#include <algorithm>

#include "error.hpp"

namespace ipdyn {

std::size_t EstimationResult::position(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw_invalid("no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

bool EstimationResult::has_coefficient(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const Diagnostic* EstimationResult::diagnostic(const std::string& name) const {
  for (const auto& d : diagnostics)
    if (d.name == name) return &d;
  return nullptr;
}

double effective_persistence(const EstimationResult& result, double wri, double err) {
  std::string base;
  for (const auto& name : result.names) {
    if (result.has_coefficient(name + "_x_wri") || result.has_coefficient(name + "_x_err")) {
      base = name;
      break;
    }
  }
  if (base.empty()) {
    for (const auto& name : result.names) {
      if (name.rfind("L.", 0) != 0) continue;
      if (!base.empty()) throw_invalid("ambiguous persistence coefficient");
      base = name;
    }
  }
  if (base.empty()) throw_invalid("result has no persistence coefficient");
  double value = result.coefficient(base);
  if (result.has_coefficient(base + "_x_wri")) value += result.coefficient(base + "_x_wri") * wri;
  if (result.has_coefficient(base + "_x_err")) value += result.coefficient(base + "_x_err") * err;
  return value;
}

}  // namespace ipdyn
