#include "csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace ipdyn {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

static std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_csv_double(const std::string& field, const std::string& source_name, std::size_t line_no,
                        const std::string& column) {
  const std::string t = trim(field);
  if (t.empty())
    throw_parse(source_name + ":" + std::to_string(line_no) + ": empty value for '" + column + "'");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw_parse(source_name + ":" + std::to_string(line_no) + ": bad numeric value '" + t +
                "' for '" + column + "'");
  return v;
}

int parse_csv_int(const std::string& field, const std::string& source_name, std::size_t line_no,
                  const std::string& column) {
  const std::string t = trim(field);
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw_parse(source_name + ":" + std::to_string(line_no) + ": bad integer '" + t + "' for '" +
                column + "'");
  return static_cast<int>(v);
}

PanelDataset read_panel_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw_parse(source_name + ": empty file");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header[0] != "unit" || header[1] != "year")
    throw_parse(source_name + ":1: header must start with 'unit,year'");
  if (header.size() == 2)
    throw_parse(source_name + ":1: no variable columns after 'unit,year'");
  const std::vector<std::string> columns(header.begin() + 2, header.end());

  std::vector<PanelDataset::Observation> observations;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw_parse(source_name + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    PanelDataset::Observation obs;
    obs.unit = trim(fields[0]);
    if (obs.unit.empty())
      throw_parse(source_name + ":" + std::to_string(line_no) + ": empty unit");
    obs.year = parse_csv_int(fields[1], source_name, line_no, "year");
    obs.values.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string t = trim(fields[c + 2]);
      if (t.empty())
        obs.values.emplace_back();
      else
        obs.values.emplace_back(parse_csv_double(t, source_name, line_no, columns[c]));
    }
    observations.push_back(std::move(obs));
  }
  try {
    return PanelDataset(columns, std::move(observations));
  } catch (const Error& e) {
    throw Error(e.code(), source_name + ": " + e.what());
  }
}

PanelDataset read_panel_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "'");
  return read_panel_csv(in, path);
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
  out << "unit,year";
  for (const auto& name : panel.column_names()) out << ',' << name;
  out << '\n';
  const auto& index = *panel.index();
  for (std::size_t r = 0; r < panel.n_rows(); ++r) {
    const auto [u, year] = index.rows[r];
    out << index.units[static_cast<std::size_t>(u)] << ',' << year;
    for (const auto& name : panel.column_names()) {
      const auto& cell = panel.column(name)[r];
      out << ',';
      if (cell) out << format_double(*cell);
    }
    out << '\n';
  }
}

void write_panel_csv_file(const std::string& path, const PanelDataset& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  write_panel_csv(out, panel);
  if (!out.good()) throw_io("write failed for '" + path + "'");
}

}  // namespace ipdyn
