#include "gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "error.hpp"
#include "linalg.hpp"
#include "stats.hpp"

namespace ipdyn {

namespace {

struct Frame {
  std::vector<std::pair<std::string, int>> sample;
  std::vector<std::pair<std::size_t, std::size_t>> unit_ranges;
  std::vector<int> unit_of, year_of;     // per retained row
  std::vector<std::size_t> panel_row;    // source row in the panel
  std::vector<std::string> coef_names;
  std::vector<int> periods;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::Index k_endog = 0, k_exog = 0, k_period = 0;
};

void validate(const PanelDataset& data, const GmmSpec& spec) {
  if (spec.dependent.empty()) throw_invalid("gmm spec needs a dependent variable");
  if (spec.endogenous.empty() && spec.exogenous.empty())
    throw_invalid("gmm spec needs at least one regressor");
  std::set<std::string> seen{spec.dependent};
  for (const auto* list : {&spec.endogenous, &spec.exogenous})
    for (const auto& name : *list) {
      if (!seen.insert(name).second)
        throw_invalid("regressor '" + name + "' listed twice (or equal to the dependent)");
      data.column(name);  // throws on unknown
    }
  data.column(spec.dependent);
  if (spec.lag_min < 2) throw_invalid("lag_min must be >= 2 for lagged-level instruments");
  if (spec.lag_max > 0 && spec.lag_max < spec.lag_min)
    throw_invalid("lag_max must be >= lag_min (or <= 0 for unbounded)");
  for (const auto& [endog, source] : spec.instrument_source) {
    if (std::find(spec.endogenous.begin(), spec.endogenous.end(), endog) == spec.endogenous.end())
      throw_invalid("instrument source given for '" + endog + "', which is not endogenous");
    data.column(source);
  }
}

Frame build_frame(const PanelDataset& data, const GmmSpec& spec) {
  validate(data, spec);
  std::vector<std::string> regressors = spec.endogenous;
  regressors.insert(regressors.end(), spec.exogenous.begin(), spec.exogenous.end());

  const Series d_dep = data.first_difference(spec.dependent);
  std::vector<Series> d_reg;
  for (const auto& name : regressors) d_reg.push_back(data.first_difference(name));

  const auto& index = *data.index();
  Frame f;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    if (!d_dep[r]) continue;
    bool complete = true;
    for (const auto& s : d_reg)
      if (!s[r]) {
        complete = false;
        break;
      }
    if (!complete) continue;
    f.panel_row.push_back(r);
    f.unit_of.push_back(index.rows[r].first);
    f.year_of.push_back(index.rows[r].second);
    f.sample.emplace_back(index.units[static_cast<std::size_t>(index.rows[r].first)],
                          index.rows[r].second);
  }
  if (f.panel_row.empty()) throw_estimation("differenced sample is empty");
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= f.panel_row.size(); ++i) {
    if (i == f.panel_row.size() || f.unit_of[i] != f.unit_of[begin]) {
      f.unit_ranges.emplace_back(begin, i);
      begin = i;
    }
  }

  if (spec.time_effects) {
    std::set<int> years(f.year_of.begin(), f.year_of.end());
    f.periods.assign(years.begin(), years.end());
  }
  f.k_endog = static_cast<Eigen::Index>(spec.endogenous.size());
  f.k_exog = static_cast<Eigen::Index>(spec.exogenous.size());
  // Time effects enter the differenced equation as a constant plus indicators
  // for every retained period past the first: the same span as per-period
  // intercepts, but with a reportable "Constant" and no rank trouble when
  // differencing thins out early periods.
  f.k_period = f.periods.empty() ? 0 : static_cast<Eigen::Index>(f.periods.size()) - 1;
  const auto n = static_cast<Eigen::Index>(f.panel_row.size());
  const Eigen::Index k = f.k_endog + f.k_exog + 1 + f.k_period;

  f.X = Eigen::MatrixXd::Zero(n, k);
  f.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t r = f.panel_row[static_cast<std::size_t>(i)];
    f.y[i] = *d_dep[r];
    for (std::size_t c = 0; c < d_reg.size(); ++c) f.X(i, static_cast<Eigen::Index>(c)) = *d_reg[c][r];
    f.X(i, f.k_endog + f.k_exog) = 1.0;
    if (!f.periods.empty()) {
      const auto p = std::lower_bound(f.periods.begin(), f.periods.end(),
                                      f.year_of[static_cast<std::size_t>(i)]) -
                     f.periods.begin();
      if (p > 0) f.X(i, f.k_endog + f.k_exog + static_cast<Eigen::Index>(p)) = 1.0;
    }
  }
  f.coef_names = regressors;
  f.coef_names.push_back("Constant");
  for (std::size_t p = 1; p < f.periods.size(); ++p)
    f.coef_names.push_back("period_" + std::to_string(f.periods[p]));
  return f;
}

InstrumentMatrix build_instruments_impl(const PanelDataset& data, const GmmSpec& spec,
                                        const Frame& f) {
  const auto& index = *data.index();
  const auto n = static_cast<Eigen::Index>(f.sample.size());
  InstrumentMatrix m;
  m.sample = f.sample;
  m.unit_ranges = f.unit_ranges;

  std::vector<std::vector<double>> cols;
  auto add_column = [&](const std::string& name) -> std::vector<double>& {
    m.names.push_back(name);
    return cols.emplace_back(static_cast<std::size_t>(n), 0.0);
  };

  std::vector<int> periods = f.periods;
  if (periods.empty()) {
    std::set<int> years(f.year_of.begin(), f.year_of.end());
    periods.assign(years.begin(), years.end());
  }

  int lag_hi = spec.lag_max;
  if (lag_hi <= 0) {
    // Unbounded: deepest lag any retained row could reach within its unit.
    lag_hi = spec.lag_min - 1;
    for (std::size_t i = 0; i < f.sample.size(); ++i) {
      const auto [u_begin, u_end] = index.unit_ranges[static_cast<std::size_t>(f.unit_of[i])];
      const int first_year = index.rows[u_begin].second;
      lag_hi = std::max(lag_hi, f.year_of[i] - first_year);
    }
  }

  bool any_gmm_cell = false;
  for (std::size_t e = 0; e < spec.endogenous.size(); ++e) {
    const auto& source = data.column(spec.source_of(spec.endogenous[e]));
    for (int lag = spec.lag_min; lag <= lag_hi; ++lag) {
      const std::string base = "gmm_" + spec.endogenous[e] + "_l" + std::to_string(lag);
      auto cell_at = [&](std::size_t i) -> double {
        const auto row = index.find(f.unit_of[i], f.year_of[i] - lag);
        if (!row || !source[*row]) return 0.0;
        any_gmm_cell = true;
        return *source[*row];
      };
      if (spec.collapse) {
        auto& col = add_column(base);
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = cell_at(i);
      } else {
        for (int p : periods) {
          auto& col = add_column(base + "_p" + std::to_string(p));
          for (std::size_t i = 0; i < col.size(); ++i)
            if (f.year_of[i] == p) col[i] = cell_at(i);
        }
      }
    }
  }
  m.gmm_column_count = m.names.size();
  if (!spec.endogenous.empty()) {
    if (m.gmm_column_count == 0)
      throw_estimation("lag window [" + std::to_string(spec.lag_min) + ", " +
                       std::to_string(lag_hi) + "] admits no lagged-level instrument column");
    if (!any_gmm_cell)
      throw_estimation("lag window exceeds the available time span for every unit; "
                       "the lagged-level instrument set is empty");
  }

  for (Eigen::Index c = f.k_endog; c < f.k_endog + f.k_exog + 1 + f.k_period; ++c) {
    // IV-style block: differenced exogenous regressors, the constant, and the
    // period indicators instrument themselves.
    auto& col = add_column(c < f.k_endog + f.k_exog
                               ? "iv_D." + spec.exogenous[static_cast<std::size_t>(c - f.k_endog)]
                               : f.coef_names[static_cast<std::size_t>(c)]);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = f.X(static_cast<Eigen::Index>(i), c);
  }

  m.Z.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      m.Z(i, static_cast<Eigen::Index>(c)) = cols[c][static_cast<std::size_t>(i)];
  return m;
}

// Sum over units of Z_i' H_i Z_i, H_i tridiagonal in consecutive years:
// 2 on the diagonal, -1 between rows one year apart, 0 across gaps.
Eigen::MatrixXd h_weighted_moment(const Frame& f, const Eigen::MatrixXd& Z) {
  const Eigen::Index q = Z.cols();
  Eigen::MatrixXd m = 2.0 * (Z.transpose() * Z);
  for (const auto& [begin, end] : f.unit_ranges) {
    for (std::size_t i = begin; i + 1 < end; ++i) {
      if (f.year_of[i + 1] - f.year_of[i] != 1) continue;
      const auto a = static_cast<Eigen::Index>(i), b = a + 1;
      const Eigen::MatrixXd cross = Z.row(a).transpose() * Z.row(b);
      m.noalias() -= cross + cross.transpose();
    }
  }
  return m;
}

Eigen::MatrixXd score_meat(const Frame& f, const Eigen::MatrixXd& Z, const Eigen::VectorXd& u) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(Z.cols(), Z.cols());
  for (const auto& [begin, end] : f.unit_ranges) {
    const auto b = static_cast<Eigen::Index>(begin), len = static_cast<Eigen::Index>(end - begin);
    const Eigen::VectorXd zu = Z.middleRows(b, len).transpose() * u.segment(b, len);
    s.noalias() += zu * zu.transpose();
  }
  return s;
}

}  // namespace

InstrumentMatrix build_instruments(const PanelDataset& data, const GmmSpec& spec) {
  return build_instruments_impl(data, spec, build_frame(data, spec));
}

Diagnostic hansen_test(const GmmFitDetail& d) {
  const Eigen::VectorXd g = d.instruments.Z.transpose() * d.u_final();
  const auto q = static_cast<int>(d.instruments.Z.cols());
  const auto k = static_cast<int>(d.X.cols());
  Diagnostic out;
  out.name = "hansen";
  out.dof = q - k;
  if (*out.dof < 0) throw_estimation("negative Hansen degrees of freedom");
  if (*out.dof == 0) {
    out.statistic = 0.0;
    out.p_value = std::numeric_limits<double>::quiet_NaN();
    out.note = "exactly identified";
    return out;
  }
  out.statistic = g.dot(d.W2 * g);
  out.p_value = chi_square_upper_tail(out.statistic, *out.dof);
  return out;
}

Diagnostic ar_test(const GmmFitDetail& d, int m, bool one_step_residuals) {
  if (m < 1) throw_invalid("AR order must be >= 1");
  const bool use_one = one_step_residuals || d.steps == GmmSteps::one;
  const Eigen::VectorXd& e = use_one ? d.u1 : d.u2;
  const Eigen::MatrixXd& W = use_one ? d.W1 : d.W2;
  const Eigen::MatrixXd& A_pinv = use_one ? d.A1_pinv : d.A2_pinv;
  const Eigen::MatrixXd V = use_one ? d.V1_robust : d.vcov_final();

  const auto n = static_cast<Eigen::Index>(d.instruments.sample.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (const auto& [begin, end] : d.instruments.unit_ranges) {
    for (std::size_t i = begin; i < end; ++i) {
      const int target = d.instruments.sample[i].second - m;
      for (std::size_t j = begin; j < i; ++j) {
        if (d.instruments.sample[j].second == target) {
          w[static_cast<Eigen::Index>(i)] = e[static_cast<Eigen::Index>(j)];
          break;
        }
      }
    }
  }
  if (w.squaredNorm() == 0.0)
    throw_estimation("insufficient overlap for the AR(" + std::to_string(m) + ") test");

  double t1 = 0.0;
  Eigen::VectorXd cvec = Eigen::VectorXd::Zero(d.instruments.Z.cols());
  for (const auto& [begin, end] : d.instruments.unit_ranges) {
    const auto b = static_cast<Eigen::Index>(begin), len = static_cast<Eigen::Index>(end - begin);
    const double we = w.segment(b, len).dot(e.segment(b, len));
    t1 += we * we;
    cvec.noalias() += we * (d.instruments.Z.middleRows(b, len).transpose() * e.segment(b, len));
  }
  const Eigen::RowVectorXd wX = w.transpose() * d.X;
  const Eigen::MatrixXd ZtX = d.instruments.Z.transpose() * d.X;
  const double t2 = -2.0 * (wX * A_pinv * (ZtX.transpose() * (W * cvec)))(0);
  const double t3 = (wX * V * wX.transpose())(0);
  const double variance = t1 + t2 + t3;
  if (!(variance > 0.0))
    throw_estimation("nonpositive variance in the AR(" + std::to_string(m) + ") test");

  Diagnostic out;
  out.name = "ar" + std::to_string(m);
  out.statistic = w.dot(e) / std::sqrt(variance);
  out.p_value = normal_two_sided_p(out.statistic);
  return out;
}

EstimationResult fit_gmm(const PanelDataset& data, const GmmSpec& spec, GmmFitDetail* detail_out) {
  Frame f = build_frame(data, spec);
  GmmFitDetail d;
  d.steps = spec.steps;
  d.windmeijer = spec.windmeijer;
  d.coef_names = f.coef_names;
  d.instruments = build_instruments_impl(data, spec, f);
  d.X = std::move(f.X);
  d.y = std::move(f.y);
  const Eigen::MatrixXd& Z = d.instruments.Z;
  const Eigen::Index k = d.X.cols(), q = Z.cols();
  if (q < k)
    throw_estimation("fewer instruments (" + std::to_string(q) + ") than parameters (" +
                     std::to_string(k) + ")");
  if (!d.X.allFinite() || !d.y.allFinite() || !Z.allFinite())
    throw_estimation("non-finite values in the differenced design");

  const Eigen::MatrixXd ZtX = Z.transpose() * d.X;
  const Eigen::VectorXd Zty = Z.transpose() * d.y;

  d.W1 = sym_pinv(h_weighted_moment(f, Z)).inverse;
  const Eigen::MatrixXd A1 = ZtX.transpose() * d.W1 * ZtX;
  const auto sp1 = sym_pinv(A1);
  if (sp1.rank < k)
    throw_estimation("model not identified: X'Z W Z'X has rank " + std::to_string(sp1.rank) +
                     " < " + std::to_string(k));
  d.A1_pinv = sp1.inverse;
  d.beta1 = d.A1_pinv * (ZtX.transpose() * (d.W1 * Zty));
  d.u1 = d.y - d.X * d.beta1;

  const Eigen::MatrixXd S1 = score_meat(f, Z, d.u1);
  d.W2 = sym_pinv(S1).inverse;
  d.V1_robust = d.A1_pinv * (ZtX.transpose() * d.W1 * S1 * d.W1 * ZtX) * d.A1_pinv;

  if (spec.steps == GmmSteps::two) {
    const Eigen::MatrixXd A2 = ZtX.transpose() * d.W2 * ZtX;
    const auto sp2 = sym_pinv(A2);
    if (sp2.rank < k)
      throw_estimation("model not identified at the two-step weight: rank " +
                       std::to_string(sp2.rank) + " < " + std::to_string(k));
    d.A2_pinv = sp2.inverse;
    d.beta2 = d.A2_pinv * (ZtX.transpose() * (d.W2 * Zty));
    d.u2 = d.y - d.X * d.beta2;
    d.V2_uncorrected = d.A2_pinv * (ZtX.transpose() * d.W2 * S1 * d.W2 * ZtX) * d.A2_pinv;
    if (spec.windmeijer) {
      const Eigen::MatrixXd P = d.A2_pinv * ZtX.transpose() * d.W2;  // k x q
      const Eigen::VectorXd v = d.W2 * (Z.transpose() * d.u2);
      Eigen::MatrixXd Gv = Eigen::MatrixXd::Zero(q, k);
      for (const auto& [begin, end] : f.unit_ranges) {
        const auto b = static_cast<Eigen::Index>(begin),
                   len = static_cast<Eigen::Index>(end - begin);
        const Eigen::MatrixXd B = Z.middleRows(b, len).transpose() * d.X.middleRows(b, len);
        const Eigen::VectorXd s = Z.middleRows(b, len).transpose() * d.u1.segment(b, len);
        Gv.noalias() += s.dot(v) * B;
        Gv.noalias() += s * (v.transpose() * B);
      }
      const Eigen::MatrixXd D = P * Gv;
      d.V2_corrected = d.V2_uncorrected + D * d.V2_uncorrected + d.V2_uncorrected * D.transpose() +
                       D * d.V1_robust * D.transpose();
    } else {
      d.V2_corrected = d.V2_uncorrected;
    }
  }

  EstimationResult result;
  result.names = d.coef_names;
  result.coefficients = d.beta_final();
  result.covariance = d.vcov_final();
  result.standard_errors = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  result.sample = d.instruments.sample;
  result.residuals = d.u_final();
  result.n_obs = static_cast<long>(result.sample.size());
  result.n_units = static_cast<long>(d.instruments.unit_ranges.size());
  result.n_instruments = static_cast<long>(q);

  result.diagnostics.push_back(hansen_test(d));
  for (int m = 1; m <= 2; ++m) {
    try {
      result.diagnostics.push_back(ar_test(d, m));
    } catch (const Error& e) {
      Diagnostic skip;
      skip.name = "ar" + std::to_string(m);
      skip.statistic = std::numeric_limits<double>::quiet_NaN();
      skip.p_value = std::numeric_limits<double>::quiet_NaN();
      skip.note = e.what();
      result.diagnostics.push_back(skip);
      result.warnings.push_back(std::string("AR(") + std::to_string(m) + ") test skipped: " + e.what());
    }
  }
  if (spec.steps == GmmSteps::two) {
    for (int m = 1; m <= 2; ++m) {
      try {
        Diagnostic one = ar_test(d, m, true);
        one.name += "_onestep";
        result.diagnostics.push_back(one);
      } catch (const Error&) {
        // the final-step diagnostic above already reports the problem
      }
    }
  }

  if (detail_out) *detail_out = std::move(d);
  return result;
}

}  // namespace ipdyn
