#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "csv.hpp"
#include "error.hpp"
#include "stats.hpp"

namespace ipdyn {

namespace {

// Right-pads the first `label_cols` columns, right-aligns every data cell.
std::string layout_rows(const std::vector<std::vector<std::string>>& rows,
                        std::size_t label_cols = 1) {
  std::size_t n_cols = 0;
  for (const auto& row : rows) n_cols = std::max(n_cols, row.size());
  std::vector<std::size_t> widths(n_cols, 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());

  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      if (c < label_cols) {
        line += row[c];
        line.append(widths[c] - row[c].size(), ' ');
      } else {
        line.append(widths[c] - row[c].size(), ' ');
        line += row[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  return format_double(v);
}

}  // namespace

std::string significance_stars(double p_value) {
  if (std::isnan(p_value)) return "";
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.10) return "*";
  return "";
}

std::string format_fixed3(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string coefficient_cell(double coefficient, double standard_error) {
  const double p = normal_two_sided_p(coefficient / standard_error);
  return format_fixed3(coefficient) + significance_stars(p) + " (" + format_fixed3(standard_error) +
         ")";
}

std::string display_label(const std::string& column, const std::string& dependent) {
  const std::string lag = "L." + dependent;
  if (column == lag) return "Lagged " + dependent;
  if (column == lag + "_x_wri") return "Lagged " + dependent + " * WRI";
  if (column == lag + "_x_lpri") return "Lagged " + dependent + " * LPRI";
  if (column == lag + "_x_err") return "Lagged " + dependent + " * exchange rate regime";
  return column;
}

std::string render_fit_table(const std::vector<FitColumn>& columns, const FitTableOptions& options) {
  if (columns.empty()) throw_invalid("fit table needs at least one column");

  // Coefficient rows in first-appearance order, time dummies hidden and the
  // constant forced last, matching the usual journal layout.
  std::vector<std::string> terms;
  bool any_constant = false;
  for (const FitColumn& col : columns) {
    for (const std::string& name : col.result.names) {
      if (name.rfind("period_", 0) == 0) continue;
      if (name == "Constant") {
        any_constant = true;
        continue;
      }
      if (std::find(terms.begin(), terms.end(), name) == terms.end()) terms.push_back(name);
    }
  }
  if (any_constant) terms.push_back("Constant");
  // Keep the interaction rows directly under the lagged dependent, as in the
  // usual journal layout, regardless of which column introduced them.
  const std::string lag = "L." + options.dependent;
  std::stable_sort(terms.begin(), terms.end(), [&](const std::string& a, const std::string& b) {
    auto family = [&](const std::string& t) {
      if (t == lag) return 0;
      if (t.rfind(lag + "_x_", 0) == 0) return 1;
      return 2;
    };
    return family(a) < family(b);
  });

  std::vector<std::vector<std::string>> rows;
  {
    std::vector<std::string> header{""};
    for (const FitColumn& col : columns) header.push_back(col.header);
    rows.push_back(std::move(header));
    std::vector<std::string> method{""};
    bool any_method = false;
    for (const FitColumn& col : columns) {
      method.push_back(col.method);
      any_method = any_method || !col.method.empty();
    }
    if (any_method) rows.push_back(std::move(method));
  }

  for (const std::string& term : terms) {
    std::string label = term;
    if (const auto it = options.labels.find(term); it != options.labels.end())
      label = it->second;
    else
      label = display_label(term, options.dependent);
    std::vector<std::string> row{label};
    for (const FitColumn& col : columns) {
      if (col.result.has_coefficient(term))
        row.push_back(
            coefficient_cell(col.result.coefficient(term), col.result.standard_error(term)));
      else
        row.emplace_back();
    }
    rows.push_back(std::move(row));
  }

  auto stat_row = [&](const std::string& label, auto getter) {
    std::vector<std::string> row{label};
    bool any = false;
    for (const FitColumn& col : columns) {
      std::string cell = getter(col);
      any = any || !cell.empty();
      row.push_back(std::move(cell));
    }
    if (any) rows.push_back(std::move(row));
  };

  stat_row("Observations",
           [](const FitColumn& c) { return std::to_string(c.result.n_obs); });
  stat_row("R-squared", [](const FitColumn& c) {
    return c.result.r_squared ? format_fixed3(*c.result.r_squared) : std::string();
  });
  stat_row("Number of units",
           [](const FitColumn& c) { return std::to_string(c.result.n_units); });
  stat_row("Number of instruments", [](const FitColumn& c) {
    return c.result.n_instruments ? std::to_string(*c.result.n_instruments) : std::string();
  });
  stat_row("Arellano-Bond test for AR(2)", [](const FitColumn& c) {
    const Diagnostic* d = c.result.diagnostic("ar2");
    return d ? format_fixed3(d->p_value) : std::string();
  });
  stat_row("Hansen test for overid. restrictions (p-value)", [](const FitColumn& c) {
    const Diagnostic* d = c.result.diagnostic("hansen");
    return d ? format_fixed3(d->p_value) : std::string();
  });

  std::string out;
  if (!options.title.empty()) {
    out += options.title;
    out += "\n\n";
  }
  out += "Dependent variable: " + options.dependent + "\n";
  out += layout_rows(rows);
  out += "*, ** and *** refer to statistical significance at the 10%, 5% and 1% level, "
         "respectively. Standard errors provided in parentheses.\n";
  return out;
}

std::string render_simulation_table(const std::vector<SimulationColumn>& columns,
                                    const std::string& title) {
  if (columns.empty()) throw_invalid("simulation table needs at least one column");

  std::vector<std::vector<std::string>> rows;
  {
    std::vector<std::string> header{"", ""};
    for (const SimulationColumn& col : columns) header.push_back(col.header);
    rows.push_back(std::move(header));
  }

  auto value_row = [&](const std::string& section, const std::string& label, auto getter) {
    std::vector<std::string> row{section, label};
    for (const SimulationColumn& col : columns) row.push_back(format_fixed3(getter(col.summary)));
    rows.push_back(std::move(row));
  };

  value_row("Baseline", "Coefficient", [](const SimulationSummary& s) { return s.baseline_coefficient; });
  value_row("", "Standard error", [](const SimulationSummary& s) { return s.baseline_se; });
  value_row("", "AR(2) p-value", [](const SimulationSummary& s) { return s.baseline_ar2_p; });
  value_row("", "Hansen p-value", [](const SimulationSummary& s) { return s.baseline_hansen_p; });
  value_row("Simulated", "Mean of coefficients", [](const SimulationSummary& s) { return s.mean; });
  value_row("", "Median of the coefficients", [](const SimulationSummary& s) { return s.median; });
  value_row("", "SD of the coefficients", [](const SimulationSummary& s) { return s.sd; });
  value_row("", "Share of positive coefficients",
            [](const SimulationSummary& s) { return s.share_positive; });
  value_row("", "Share of negative coefficients which are significant at 5%",
            [](const SimulationSummary& s) { return s.share_negative_significant; });
  value_row("", "AR(2) p-value", [](const SimulationSummary& s) { return s.ar2_p_summary; });
  value_row("", "Hansen p-value", [](const SimulationSummary& s) { return s.hansen_p_summary; });

  std::string out;
  if (!title.empty()) {
    out += title;
    out += "\n\n";
  }
  out += layout_rows(rows, 2);
  return out;
}

void write_fit_results_csv(std::ostream& out, const std::vector<FitColumn>& columns) {
  out << "column,method,term,coefficient,std_error,p_value,stars\n";
  for (const FitColumn& col : columns) {
    for (std::size_t i = 0; i < col.result.names.size(); ++i) {
      const double coef = col.result.coefficients[static_cast<Eigen::Index>(i)];
      const double se = col.result.standard_errors[static_cast<Eigen::Index>(i)];
      const double p = normal_two_sided_p(coef / se);
      out << col.header << ',' << col.method << ',' << col.result.names[i] << ','
          << format_double(coef) << ',' << format_double(se) << ',' << csv_number(p) << ','
          << significance_stars(p) << '\n';
    }
  }
}

void write_fit_diagnostics_csv(std::ostream& out, const std::vector<FitColumn>& columns) {
  out << "column,method,name,statistic,dof,p_value,note\n";
  for (const FitColumn& col : columns) {
    for (const Diagnostic& d : col.result.diagnostics) {
      out << col.header << ',' << col.method << ',' << d.name << ',' << csv_number(d.statistic)
          << ',' << (d.dof ? std::to_string(*d.dof) : "") << ',' << csv_number(d.p_value) << ','
          << d.note << '\n';
    }
    out << col.header << ',' << col.method << ",observations," << col.result.n_obs << ",,,\n";
    out << col.header << ',' << col.method << ",units," << col.result.n_units << ",,,\n";
    if (col.result.n_instruments)
      out << col.header << ',' << col.method << ",instruments," << *col.result.n_instruments
          << ",,,\n";
    if (col.result.r_squared)
      out << col.header << ',' << col.method << ",r_squared," << format_double(*col.result.r_squared)
          << ",,,\n";
  }
}

void write_simulation_summary_csv(std::ostream& out, const std::vector<SimulationColumn>& columns) {
  out << "scenario,field,value\n";
  for (const SimulationColumn& col : columns) {
    const SimulationSummary& s = col.summary;
    const std::vector<std::pair<std::string, std::string>> fields = {
        {"baseline_coefficient", csv_number(s.baseline_coefficient)},
        {"baseline_std_error", csv_number(s.baseline_se)},
        {"baseline_ar2_p", csv_number(s.baseline_ar2_p)},
        {"baseline_hansen_p", csv_number(s.baseline_hansen_p)},
        {"mean", csv_number(s.mean)},
        {"median", csv_number(s.median)},
        {"sd", csv_number(s.sd)},
        {"share_positive", csv_number(s.share_positive)},
        {"share_nonpositive", csv_number(s.share_nonpositive)},
        {"share_negative_significant", csv_number(s.share_negative_significant)},
        {"ar2_p", csv_number(s.ar2_p_summary)},
        {"hansen_p", csv_number(s.hansen_p_summary)},
        {"reps", std::to_string(s.reps)},
        {"converged", std::to_string(s.converged)},
        {"failures", std::to_string(s.failures)},
        {"significance_level", csv_number(s.significance_level)},
    };
    for (const auto& [name, value] : fields)
      out << col.header << ',' << name << ',' << value << '\n';
  }
}

void write_draws_csv(std::ostream& out, const std::vector<DrawRecord>& draws) {
  out << "draw,converged,coefficient,std_error,p_value,ar2_p,hansen_p,error\n";
  for (const DrawRecord& d : draws) {
    out << d.draw_index << ',' << (d.converged ? 1 : 0) << ',' << csv_number(d.coefficient) << ','
        << csv_number(d.standard_error) << ',' << csv_number(d.p_value) << ','
        << csv_number(d.ar2_p) << ',' << csv_number(d.hansen_p) << ',' << d.error << '\n';
  }
}

std::string render_descriptives_table(const std::vector<DescriptiveRow>& rows) {
  auto fixed2 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> table;
  table.push_back({"Variable", "Obs", "Mean", "Std.Dev.", "Min", "Max"});
  for (const DescriptiveRow& r : rows) {
    std::vector<std::string> row{r.variable, std::to_string(r.obs)};
    if (r.obs > 0) {
      row.push_back(fixed2(r.mean));
      row.push_back(r.sd ? fixed2(*r.sd) : "");
      row.push_back(fixed2(r.min));
      row.push_back(fixed2(r.max));
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    table.push_back(std::move(row));
  }
  return layout_rows(table);
}

void write_descriptives_csv(std::ostream& out, const std::vector<DescriptiveRow>& rows) {
  out << "variable,obs,mean,sd,min,max\n";
  for (const DescriptiveRow& r : rows) {
    out << r.variable << ',' << r.obs << ',';
    if (r.obs > 0)
      out << format_double(r.mean) << ',' << (r.sd ? format_double(*r.sd) : "") << ','
          << format_double(r.min) << ',' << format_double(r.max);
    else
      out << ",,,";
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_lower,count\n";
  for (const HistogramBin& b : bins) out << format_double(b.lower) << ',' << b.count << '\n';
}

void write_scatter_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                       const std::vector<ScatterPoint>& points) {
  out << "unit,year," << x_name << ',' << y_name << '\n';
  for (const ScatterPoint& p : points)
    out << p.unit << ',' << p.year << ',' << format_double(p.x) << ',' << format_double(p.y)
        << '\n';
}

void write_volatility_csv(std::ostream& out, const std::vector<VolatilityProfile>& profiles) {
  // Callers pass one profile per variable; flatten with a variable tag only
  // when there are several.
  out << "unit,sd_of_changes\n";
  for (const VolatilityProfile& profile : profiles) {
    for (const auto& [unit, sd] : profile.per_unit) out << unit << ',' << format_double(sd) << '\n';
    for (const std::string& unit : profile.omitted) out << unit << ",\n";
  }
}

}  // namespace ipdyn
