#include "fe.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "error.hpp"

namespace ipdyn {

Eigen::MatrixXd cluster_robust_covariance(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& residuals,
                                          const std::vector<int>& cluster_ids,
                                          const Eigen::MatrixXd& bread) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (residuals.size() != n || static_cast<Eigen::Index>(cluster_ids.size()) != n)
    throw_invalid("cluster covariance: row count mismatch");
  std::map<int, Eigen::RowVectorXd> scores;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto it = scores.try_emplace(cluster_ids[static_cast<std::size_t>(r)],
                                       Eigen::RowVectorXd::Zero(k)).first;
    it->second += residuals[r] * X.row(r);
  }
  const auto g = static_cast<double>(scores.size());
  if (g < 2) throw_invalid("cluster covariance needs >= 2 clusters");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : scores) meat += s.transpose() * s;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double factor = g / (g - 1.0) * (nn - 1.0) / (nn - kk);
  return factor * bread * meat * bread;
}

EstimationResult fit_fe(const PanelDataset& data, const FeSpec& spec) {
  if (spec.dependent.empty() || spec.regressors.empty())
    throw_invalid("fe spec needs a dependent variable and >= 1 regressor");
  for (std::size_t i = 0; i < spec.regressors.size(); ++i) {
    if (spec.regressors[i] == spec.dependent)
      throw_invalid("dependent '" + spec.dependent + "' cannot also be a regressor");
    for (std::size_t j = i + 1; j < spec.regressors.size(); ++j)
      if (spec.regressors[i] == spec.regressors[j])
        throw_invalid("duplicate regressor '" + spec.regressors[i] + "'");
  }
  std::vector<const std::vector<Cell>*> cols;
  cols.push_back(&data.column(spec.dependent));
  for (const auto& name : spec.regressors) cols.push_back(&data.column(name));

  const auto& index = *data.index();
  std::vector<std::size_t> rows;  // listwise-complete rows of the source panel
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    bool complete = true;
    for (const auto* col : cols)
      if (!(*col)[r]) {
        complete = false;
        break;
      }
    if (complete) rows.push_back(r);
  }

  EstimationResult result;
  if (spec.time_effects) {
    // A year observed for a single unit would be fit exactly by its own dummy;
    // drop such rows instead of letting them distort the within fit.
    for (;;) {
      std::map<int, std::size_t> year_count;
      for (std::size_t r : rows) ++year_count[index.rows[r].second];
      std::set<int> singleton_years;
      for (const auto& [year, count] : year_count)
        if (count == 1) singleton_years.insert(year);
      if (singleton_years.empty()) break;
      for (int year : singleton_years)
        result.warnings.push_back("year " + std::to_string(year) +
                                  " observed for a single unit; dropped");
      std::erase_if(rows, [&](std::size_t r) {
        return singleton_years.count(index.rows[r].second) > 0;
      });
    }
  }
  if (rows.empty()) throw_estimation("no complete observations");

  std::vector<int> unit_of, year_of;
  std::set<int> units_seen, years_seen;
  for (std::size_t r : rows) {
    unit_of.push_back(index.rows[r].first);
    year_of.push_back(index.rows[r].second);
    units_seen.insert(index.rows[r].first);
    years_seen.insert(index.rows[r].second);
  }
  std::map<int, Eigen::Index> unit_pos, year_pos;  // skipping the first level of each
  for (int u : units_seen)
    if (u != *units_seen.begin()) unit_pos.emplace(u, static_cast<Eigen::Index>(unit_pos.size()));
  for (int y : years_seen)
    if (y != *years_seen.begin()) year_pos.emplace(y, static_cast<Eigen::Index>(year_pos.size()));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k_reg = static_cast<Eigen::Index>(spec.regressors.size());
  const Eigen::Index k_unit = spec.unit_effects ? static_cast<Eigen::Index>(unit_pos.size()) : 0;
  const Eigen::Index k_year = spec.time_effects ? static_cast<Eigen::Index>(year_pos.size()) : 0;
  const Eigen::Index k = k_reg + 1 + k_unit + k_year;  // slopes, constant, dummies
  if (n < k)
    throw_estimation("fewer observations (" + std::to_string(n) + ") than parameters (" +
                     std::to_string(k) + ")");

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t r = rows[static_cast<std::size_t>(i)];
    y[i] = *(*cols[0])[r];
    for (Eigen::Index c = 0; c < k_reg; ++c) X(i, c) = *(*cols[static_cast<std::size_t>(c) + 1])[r];
    X(i, k_reg) = 1.0;
    if (spec.unit_effects) {
      const auto it = unit_pos.find(unit_of[static_cast<std::size_t>(i)]);
      if (it != unit_pos.end()) X(i, k_reg + 1 + it->second) = 1.0;
    }
    if (spec.time_effects) {
      const auto it = year_pos.find(year_of[static_cast<std::size_t>(i)]);
      if (it != year_pos.end()) X(i, k_reg + 1 + k_unit + it->second) = 1.0;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k)
    throw_rank("design matrix rank " + std::to_string(qr.rank()) + " < " + std::to_string(k) +
               " columns (collinear regressors, or regressors absorbed by the fixed effects)");
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;

  const Eigen::MatrixXd bread =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd vcov_full = cluster_robust_covariance(X, resid, unit_of, bread);

  // Within R^2: explained share of the variation left after the effects alone.
  double ssr_full = resid.squaredNorm();
  {
    Eigen::MatrixXd D = X.rightCols(1 + k_unit + k_year);
    Eigen::VectorXd gamma = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(D).solve(y);
    const double ssr_effects = (y - D * gamma).squaredNorm();
    result.r_squared = ssr_effects > 0 ? 1.0 - ssr_full / ssr_effects : 1.0;
  }

  result.names = spec.regressors;
  result.names.push_back("Constant");
  const Eigen::Index k_rep = k_reg + 1;
  result.coefficients = beta.head(k_rep);
  result.covariance = vcov_full.topLeftCorner(k_rep, k_rep);
  result.standard_errors = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  result.residuals = resid;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t r = rows[static_cast<std::size_t>(i)];
    result.sample.emplace_back(index.units[static_cast<std::size_t>(index.rows[r].first)],
                               index.rows[r].second);
  }
  result.n_obs = n;
  result.n_units = static_cast<long>(units_seen.size());
  return result;
}

}  // namespace ipdyn
