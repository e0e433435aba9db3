#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "estimation.hpp"
#include "panel.hpp"
#include "sim.hpp"

namespace ipdyn {

// Journal-style estimation table: one column per fitted specification,
// coefficient cells rendered as "0.391*** (0.075)" with significance stars at
// the 10/5/1% levels from a two-sided normal test.
struct FitColumn {
  std::string header;  // e.g. "(1)"
  std::string method;  // "FE" or "GMM"
  EstimationResult result;
};

struct FitTableOptions {
  std::string dependent = "inflation";
  std::string title;
  std::map<std::string, std::string> labels;  // overrides for regressor display names
};

std::string significance_stars(double p_value);
std::string format_fixed3(double v);
std::string coefficient_cell(double coefficient, double standard_error);
// Built-in display names: lag and interaction columns of `dependent` get the
// "Lagged <dep> * ..." treatment, everything else passes through.
std::string display_label(const std::string& column, const std::string& dependent);

std::string render_fit_table(const std::vector<FitColumn>& columns, const FitTableOptions& options);

// Simulation table: Baseline block (point estimates) over a Simulated block
// (distribution of the tracked coefficient across draws), one column per
// scenario.
struct SimulationColumn {
  std::string header;
  SimulationSummary summary;
};

std::string render_simulation_table(const std::vector<SimulationColumn>& columns,
                                    const std::string& title);

// Machine-readable companions to the text tables. All CSV numbers use
// shortest round-trip formatting so reruns are byte-comparable.
void write_fit_results_csv(std::ostream& out, const std::vector<FitColumn>& columns);
void write_fit_diagnostics_csv(std::ostream& out, const std::vector<FitColumn>& columns);
void write_simulation_summary_csv(std::ostream& out, const std::vector<SimulationColumn>& columns);
void write_draws_csv(std::ostream& out, const std::vector<DrawRecord>& draws);

// "Variable  Obs  Mean  Std.Dev.  Min  Max" text block, two decimals.
std::string render_descriptives_table(const std::vector<DescriptiveRow>& rows);

void write_descriptives_csv(std::ostream& out, const std::vector<DescriptiveRow>& rows);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);
void write_scatter_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                       const std::vector<ScatterPoint>& points);
void write_volatility_csv(std::ostream& out, const std::vector<VolatilityProfile>& profiles);

}  // namespace ipdyn
