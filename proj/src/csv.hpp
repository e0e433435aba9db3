#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "panel.hpp"

namespace ipdyn {

// Panel CSV contract: header `unit,year,<var>...`, one row per (unit, year),
// empty fields are missing values. No quoting; unit names must not contain
// commas.
PanelDataset read_panel_csv(std::istream& in, const std::string& source_name);
PanelDataset read_panel_csv_file(const std::string& path);

void write_panel_csv(std::ostream& out, const PanelDataset& panel);
void write_panel_csv_file(const std::string& path, const PanelDataset& panel);

// Shared low-level helpers, also used by the institution reader.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_csv_double(const std::string& field, const std::string& source_name, std::size_t line_no,
                        const std::string& column);
int parse_csv_int(const std::string& field, const std::string& source_name, std::size_t line_no,
                  const std::string& column);
std::string format_double(double v);  // shortest round-trip (%.17g trimmed)

}  // namespace ipdyn
