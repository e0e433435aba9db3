#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipdyn {

using Cell = std::optional<double>;

// Row keys of a long-format panel: unit-major, years strictly increasing
// within a unit. Shared (via shared_ptr) between a dataset and every series
// derived from it, so index compatibility is a pointer or value comparison.
struct RowIndex {
  std::vector<std::string> units;                              // ordered unit ids
  std::vector<std::pair<int, int>> rows;                       // (unit idx, year)
  std::vector<std::pair<std::size_t, std::size_t>> unit_ranges;  // [begin, end) per unit

  std::size_t n_rows() const { return rows.size(); }
  bool same_as(const RowIndex& other) const;
  // Row position of (unit idx, year), if present.
  std::optional<std::size_t> find(int unit_idx, int year) const;
};

// A named column aligned to a RowIndex. Derived series (lags, differences,
// interactions) are missing wherever any required input cell is absent.
class Series {
public:
  Series(std::shared_ptr<const RowIndex> index, std::string name, std::vector<Cell> values);

  const std::string& name() const { return name_; }
  const std::vector<Cell>& values() const { return values_; }
  const std::shared_ptr<const RowIndex>& index() const { return index_; }
  std::size_t size() const { return values_.size(); }
  const Cell& operator[](std::size_t i) const { return values_[i]; }

private:
  std::shared_ptr<const RowIndex> index_;
  std::string name_;
  std::vector<Cell> values_;
};

struct DescriptiveRow {
  std::string variable;
  std::size_t obs = 0;
  double mean = 0.0;
  std::optional<double> sd;  // n-1 denominator; unset when obs < 2
  double min = 0.0;
  double max = 0.0;
};

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;
};

struct ScatterPoint {
  std::string unit;
  int year = 0;
  double x = 0.0;
  double y = 0.0;
};

struct VolatilityProfile {
  std::vector<std::pair<std::string, double>> per_unit;  // unit -> sd of changes
  std::vector<std::string> omitted;                      // units with too few changes
};

// Immutable rectangular panel in long form. All transforms return new series
// or new datasets; a constructed dataset is safe to share across threads.
class PanelDataset {
public:
  struct Observation {
    std::string unit;
    int year = 0;
    std::vector<Cell> values;  // aligned with the column name list
  };

  PanelDataset(std::vector<std::string> column_names, std::vector<Observation> observations);

  const std::shared_ptr<const RowIndex>& index() const { return index_; }
  const std::vector<std::string>& units() const { return index_->units; }
  std::vector<int> years() const;  // distinct years, ascending
  std::size_t n_rows() const { return index_->n_rows(); }
  std::size_t n_units() const { return index_->units.size(); }

  const std::vector<std::string>& column_names() const { return column_names_; }
  bool has_column(const std::string& name) const;
  const std::vector<Cell>& column(const std::string& name) const;
  Series series(const std::string& name) const;
  Cell at(const std::string& column, const std::string& unit, int year) const;

  // Returns a dataset with the series appended (or replaced, when a column of
  // the same name exists). The series index must match this dataset's index.
  PanelDataset with_column(const Series& s) const;

  // Keeps rows with first_year <= year <= last_year.
  PanelDataset restrict_years(int first_year, int last_year) const;

  // Value at (i, t) is the column's value at (i, t-k) when that year exists
  // for the unit; gap years break the lag.
  Series lag(const std::string& column, int k) const;

  // x_t - x_{t-1} where both cells exist and the years are consecutive.
  Series first_difference(const std::string& column) const;

  std::vector<DescriptiveRow> describe(const std::vector<std::string>& columns) const;

  // Per-unit standard deviation of period-over-period changes. Units with
  // fewer than two observed changes are omitted and listed.
  VolatilityProfile volatility_profile(const std::string& column) const;

  // Counts over half-open bins [k*w, (k+1)*w) covering the observed range,
  // zero-count interior bins included.
  std::vector<HistogramBin> histogram(const std::string& column, double bin_width) const;

  // Rows where both cells are present, in (unit, year) order.
  std::vector<ScatterPoint> scatter_pairs(const std::string& x, const std::string& y) const;

private:
  PanelDataset() = default;

  std::size_t column_position(const std::string& name) const;

  std::shared_ptr<const RowIndex> index_;
  std::vector<std::string> column_names_;
  std::map<std::string, std::size_t> column_lookup_;
  std::vector<std::vector<Cell>> columns_;
};

// Cellwise product; missing if either input is missing. Index sets must match.
Series interact(const Series& a, const Series& b, const std::string& name = "");

// Product with a time-invariant per-unit value broadcast over years. Units
// absent from the map yield missing cells.
Series interact(const Series& a, const std::map<std::string, double>& unit_values,
                const std::string& name);

}  // namespace ipdyn
