#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipdyn {

struct Diagnostic {
  std::string name;  // "hansen", "ar1", "ar2", ...
  double statistic = 0;
  std::optional<int> dof;
  double p_value = 1;
  std::string note;  // e.g. "exactly identified"
};

struct EstimationResult {
  std::vector<std::string> names;  // slope coefficients in request order
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd standard_errors;
  std::vector<std::pair<std::string, int>> sample;  // (unit, year) of each residual row
  Eigen::VectorXd residuals;
  long n_obs = 0;
  long n_units = 0;
  std::optional<long> n_instruments;
  std::optional<double> r_squared;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> warnings;

  std::size_t position(const std::string& name) const;
  bool has_coefficient(const std::string& name) const;
  double coefficient(const std::string& name) const { return coefficients[static_cast<Eigen::Index>(position(name))]; }
  double standard_error(const std::string& name) const { return standard_errors[static_cast<Eigen::Index>(position(name))]; }
  const Diagnostic* diagnostic(const std::string& name) const;
};

// rho0 + rho1*wri + rho2*err from a fitted result, skipping absent terms. The
// persistence coefficient is located by its interaction partners (names
// "<base>_x_wri" / "<base>_x_err"), falling back to a unique "L."-prefixed name.
double effective_persistence(const EstimationResult& result, double wri, double err);

}  // namespace ipdyn
