#include "panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace ipdyn {

bool RowIndex::same_as(const RowIndex& other) const {
  if (this == &other) return true;
  return units == other.units && rows == other.rows;
}

std::optional<std::size_t> RowIndex::find(int unit_idx, int year) const {
  if (unit_idx < 0 || static_cast<std::size_t>(unit_idx) >= unit_ranges.size()) return std::nullopt;
  const auto [begin, end] = unit_ranges[unit_idx];
  const auto first = rows.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = rows.begin() + static_cast<std::ptrdiff_t>(end);
  const auto it = std::lower_bound(first, last, year,
                                   [](const std::pair<int, int>& row, int y) { return row.second < y; });
  if (it == last || it->second != year) return std::nullopt;
  return static_cast<std::size_t>(it - rows.begin());
}

Series::Series(std::shared_ptr<const RowIndex> index, std::string name, std::vector<Cell> values)
    : index_(std::move(index)), name_(std::move(name)), values_(std::move(values)) {
  if (!index_) throw_invalid("series requires a row index");
  if (values_.size() != index_->n_rows())
    throw_invalid("series '" + name_ + "' has " + std::to_string(values_.size()) +
                  " cells for " + std::to_string(index_->n_rows()) + " rows");
}

PanelDataset::PanelDataset(std::vector<std::string> column_names,
                           std::vector<Observation> observations) {
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    if (column_names[i] == "unit" || column_names[i] == "year")
      throw_invalid("'" + column_names[i] + "' is a reserved key column name");
    for (std::size_t j = i + 1; j < column_names.size(); ++j)
      if (column_names[i] == column_names[j])
        throw_invalid("duplicate column name '" + column_names[i] + "'");
  }

  // Canonical order: units lexicographic, years ascending. Load order of the
  // input rows never leaks into the dataset.
  std::sort(observations.begin(), observations.end(), [](const Observation& a, const Observation& b) {
    if (a.unit != b.unit) return a.unit < b.unit;
    return a.year < b.year;
  });

  auto index = std::make_shared<RowIndex>();
  for (std::size_t r = 0; r < observations.size(); ++r) {
    const auto& obs = observations[r];
    if (obs.values.size() != column_names.size())
      throw_invalid("observation (" + obs.unit + ", " + std::to_string(obs.year) + ") has " +
                    std::to_string(obs.values.size()) + " values for " +
                    std::to_string(column_names.size()) + " columns");
    if (r > 0 && obs.unit == observations[r - 1].unit && obs.year == observations[r - 1].year)
      throw_invalid("duplicate (unit, year) pair (" + obs.unit + ", " + std::to_string(obs.year) + ")");
    if (index->units.empty() || index->units.back() != obs.unit) index->units.push_back(obs.unit);
    index->rows.emplace_back(static_cast<int>(index->units.size()) - 1, obs.year);
  }
  std::size_t begin = 0;
  for (std::size_t u = 0; u < index->units.size(); ++u) {
    std::size_t end = begin;
    while (end < index->rows.size() && index->rows[end].first == static_cast<int>(u)) ++end;
    index->unit_ranges.emplace_back(begin, end);
    begin = end;
  }

  columns_.assign(column_names.size(), std::vector<Cell>(observations.size()));
  for (std::size_t r = 0; r < observations.size(); ++r)
    for (std::size_t c = 0; c < column_names.size(); ++c)
      columns_[c][r] = observations[r].values[c];

  index_ = std::move(index);
  column_names_ = std::move(column_names);
  for (std::size_t c = 0; c < column_names_.size(); ++c) column_lookup_[column_names_[c]] = c;
}

std::vector<int> PanelDataset::years() const {
  std::vector<int> ys;
  for (const auto& row : index_->rows) ys.push_back(row.second);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return ys;
}

bool PanelDataset::has_column(const std::string& name) const {
  return column_lookup_.count(name) > 0;
}

std::size_t PanelDataset::column_position(const std::string& name) const {
  const auto it = column_lookup_.find(name);
  if (it == column_lookup_.end()) throw_invalid("unknown column '" + name + "'");
  return it->second;
}

const std::vector<Cell>& PanelDataset::column(const std::string& name) const {
  return columns_[column_position(name)];
}

Series PanelDataset::series(const std::string& name) const {
  return Series(index_, name, column(name));
}

Cell PanelDataset::at(const std::string& column_name, const std::string& unit, int year) const {
  const auto& col = column(column_name);
  const auto uit = std::lower_bound(index_->units.begin(), index_->units.end(), unit);
  if (uit == index_->units.end() || *uit != unit) return std::nullopt;
  const auto row = index_->find(static_cast<int>(uit - index_->units.begin()), year);
  if (!row) return std::nullopt;
  return col[*row];
}

PanelDataset PanelDataset::with_column(const Series& s) const {
  if (!s.index()->same_as(*index_)) throw_invalid("series '" + s.name() + "' index mismatch");
  PanelDataset out = *this;
  const auto it = out.column_lookup_.find(s.name());
  if (it != out.column_lookup_.end()) {
    out.columns_[it->second] = s.values();
  } else {
    out.column_lookup_[s.name()] = out.column_names_.size();
    out.column_names_.push_back(s.name());
    out.columns_.push_back(s.values());
  }
  return out;
}

PanelDataset PanelDataset::restrict_years(int first_year, int last_year) const {
  if (first_year > last_year) throw_invalid("empty year window");
  std::vector<Observation> kept;
  for (std::size_t r = 0; r < index_->rows.size(); ++r) {
    const auto [u, year] = index_->rows[r];
    if (year < first_year || year > last_year) continue;
    Observation obs;
    obs.unit = index_->units[static_cast<std::size_t>(u)];
    obs.year = year;
    obs.values.reserve(columns_.size());
    for (const auto& col : columns_) obs.values.push_back(col[r]);
    kept.push_back(std::move(obs));
  }
  return PanelDataset(column_names_, std::move(kept));
}

Series PanelDataset::lag(const std::string& column_name, int k) const {
  if (k < 1) throw_invalid("lag order must be >= 1");
  const auto& col = column(column_name);
  std::vector<Cell> values(n_rows());
  for (std::size_t r = 0; r < n_rows(); ++r) {
    const auto [u, year] = index_->rows[r];
    const auto src = index_->find(u, year - k);
    if (src) values[r] = col[*src];
  }
  const std::string prefix = k == 1 ? "L." : "L" + std::to_string(k) + ".";
  return Series(index_, prefix + column_name, std::move(values));
}

Series PanelDataset::first_difference(const std::string& column_name) const {
  const auto& col = column(column_name);
  std::vector<Cell> values(n_rows());
  for (std::size_t r = 0; r < n_rows(); ++r) {
    const auto [u, year] = index_->rows[r];
    const auto prev = index_->find(u, year - 1);
    if (prev && col[r] && col[*prev]) values[r] = *col[r] - *col[*prev];
  }
  return Series(index_, "D." + column_name, std::move(values));
}

std::vector<DescriptiveRow> PanelDataset::describe(const std::vector<std::string>& columns) const {
  std::vector<DescriptiveRow> out;
  for (const auto& name : columns) {
    const auto& col = column(name);
    DescriptiveRow row;
    row.variable = name;
    double sum = 0.0;
    row.min = std::numeric_limits<double>::infinity();
    row.max = -std::numeric_limits<double>::infinity();
    for (const auto& cell : col) {
      if (!cell) continue;
      ++row.obs;
      sum += *cell;
      row.min = std::min(row.min, *cell);
      row.max = std::max(row.max, *cell);
    }
    if (row.obs > 0) {
      row.mean = sum / static_cast<double>(row.obs);
      if (row.obs > 1) {
        double ss = 0.0;
        for (const auto& cell : col)
          if (cell) ss += (*cell - row.mean) * (*cell - row.mean);
        row.sd = std::sqrt(ss / static_cast<double>(row.obs - 1));
      }
    } else {
      row.min = row.max = 0.0;
    }
    out.push_back(std::move(row));
  }
  return out;
}

VolatilityProfile PanelDataset::volatility_profile(const std::string& column_name) const {
  const Series diff = first_difference(column_name);
  VolatilityProfile out;
  for (std::size_t u = 0; u < index_->units.size(); ++u) {
    const auto [begin, end] = index_->unit_ranges[u];
    std::vector<double> changes;
    for (std::size_t r = begin; r < end; ++r)
      if (diff[r]) changes.push_back(*diff[r]);
    if (changes.size() < 2) {
      out.omitted.push_back(index_->units[u]);
      continue;
    }
    double mean = 0.0;
    for (double c : changes) mean += c;
    mean /= static_cast<double>(changes.size());
    double ss = 0.0;
    for (double c : changes) ss += (c - mean) * (c - mean);
    out.per_unit.emplace_back(index_->units[u],
                              std::sqrt(ss / static_cast<double>(changes.size() - 1)));
  }
  return out;
}

std::vector<HistogramBin> PanelDataset::histogram(const std::string& column_name,
                                                  double bin_width) const {
  if (!(bin_width > 0.0)) throw_invalid("bin width must be positive");
  const auto& col = column(column_name);
  long min_bin = 0, max_bin = 0;
  bool any = false;
  for (const auto& cell : col) {
    if (!cell) continue;
    const long b = static_cast<long>(std::floor(*cell / bin_width));
    if (!any) {
      min_bin = max_bin = b;
      any = true;
    } else {
      min_bin = std::min(min_bin, b);
      max_bin = std::max(max_bin, b);
    }
  }
  if (!any) throw_invalid("column '" + column_name + "' has no observations to bin");
  std::vector<HistogramBin> bins;
  for (long b = min_bin; b <= max_bin; ++b)
    bins.push_back({static_cast<double>(b) * bin_width, 0});
  for (const auto& cell : col) {
    if (!cell) continue;
    const long b = static_cast<long>(std::floor(*cell / bin_width));
    ++bins[static_cast<std::size_t>(b - min_bin)].count;
  }
  return bins;
}

std::vector<ScatterPoint> PanelDataset::scatter_pairs(const std::string& x,
                                                      const std::string& y) const {
  const auto& xs = column(x);
  const auto& ys = column(y);
  std::vector<ScatterPoint> out;
  for (std::size_t r = 0; r < n_rows(); ++r) {
    if (!xs[r] || !ys[r]) continue;
    const auto [u, year] = index_->rows[r];
    out.push_back({index_->units[static_cast<std::size_t>(u)], year, *xs[r], *ys[r]});
  }
  return out;
}

Series interact(const Series& a, const Series& b, const std::string& name) {
  if (!a.index()->same_as(*b.index()))
    throw_invalid("interaction of '" + a.name() + "' and '" + b.name() + "': index mismatch");
  std::vector<Cell> values(a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r] && b[r]) values[r] = *a[r] * *b[r];
  return Series(a.index(), name.empty() ? a.name() + "_x_" + b.name() : name, std::move(values));
}

Series interact(const Series& a, const std::map<std::string, double>& unit_values,
                const std::string& name) {
  const auto& index = *a.index();
  std::vector<Cell> values(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (!a[r]) continue;
    const auto& unit = index.units[static_cast<std::size_t>(index.rows[r].first)];
    const auto it = unit_values.find(unit);
    if (it != unit_values.end()) values[r] = *a[r] * it->second;
  }
  return Series(a.index(), name, std::move(values));
}

}  // namespace ipdyn
