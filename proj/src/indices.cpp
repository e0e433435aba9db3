#include "indices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"

namespace ipdyn {

static void check_range(double v, double lo, double hi, const std::string& what) {
  if (!(v >= lo && v <= hi))
    throw_invalid(what + " = " + format_double(v) + " outside [" + format_double(lo) + ", " +
                  format_double(hi) + "]");
}

double compute_wri(const WriScores& s) {
  check_range(s.d1, 0, 2, "wri_d1");
  check_range(s.d2, 0, 2, "wri_d2");
  check_range(s.d3, 0, 2, "wri_d3");
  return s.d1 + s.d2 + s.d3;
}

double compute_lpri(const LpriScores& s) {
  check_range(s.d1, 0, 2.5, "lpri_d1");
  check_range(s.d2, 0, 2.5, "lpri_d2");
  check_range(s.d3, 0, 2.5, "lpri_d3");
  check_range(s.d4, 0, 2.5, "lpri_d4");
  return s.d1 + s.d2 + s.d3 + s.d4;
}

double regime_rigidity(int code) {
  if (code < 1 || code > 3) throw_invalid("regime code " + std::to_string(code) + " not in {1,2,3}");
  return static_cast<double>(4 - code);
}

void IndexWithBand::validate(const std::string& what) const {
  if (!(band >= 0)) throw_invalid(what + " band must be >= 0");
  check_range(point, domain_min, domain_max, what);
}

IndexWithBand wri_with_band(double point, double band) {
  IndexWithBand v{point, band, 0.0, 6.0};
  v.validate("wri");
  return v;
}

IndexWithBand lpri_with_band(double point, double band) {
  IndexWithBand v{point, band, 0.0, 10.0};
  v.validate("lpri");
  return v;
}

RegimeAssignment RegimeAssignment::from_code(int code) {
  regime_rigidity(code);  // validates the code
  RegimeAssignment a;
  a.code = code;
  a.probabilities = {0.1, 0.1, 0.1};
  a.probabilities[static_cast<std::size_t>(code - 1)] = 0.8;
  return a;
}

void RegimeAssignment::validate(const std::string& what) const {
  regime_rigidity(code);
  double sum = 0;
  for (double p : probabilities) {
    if (!(p >= 0)) throw_invalid(what + ": negative regime probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw_invalid(what + ": regime probabilities sum to " + format_double(sum) + ", not 1");
  const auto modal =
      std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin();
  if (static_cast<int>(modal) + 1 != code &&
      probabilities[static_cast<std::size_t>(code - 1)] != probabilities[static_cast<std::size_t>(modal)])
    throw_invalid(what + ": assigned regime " + std::to_string(code) +
                  " is not the modal category of its probabilities");
}

InstitutionTable::InstitutionTable(std::vector<InstitutionRecord> records)
    : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const InstitutionRecord& a, const InstitutionRecord& b) { return a.unit < b.unit; });
  for (std::size_t i = 0; i + 1 < records_.size(); ++i)
    if (records_[i].unit == records_[i + 1].unit)
      throw_invalid("duplicate institution row for unit '" + records_[i].unit + "'");
  for (const auto& rec : records_) {
    if (rec.unit.empty()) throw_invalid("institution row with empty unit");
    if (rec.wri) rec.wri->validate("wri for '" + rec.unit + "'");
    if (rec.lpri) rec.lpri->validate("lpri for '" + rec.unit + "'");
    if (rec.regime) rec.regime->validate("regime for '" + rec.unit + "'");
  }
}

const InstitutionRecord* InstitutionTable::find(const std::string& unit) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), unit,
      [](const InstitutionRecord& rec, const std::string& u) { return rec.unit < u; });
  if (it == records_.end() || it->unit != unit) return nullptr;
  return &*it;
}

const InstitutionRecord& InstitutionTable::at(const std::string& unit) const {
  const auto* rec = find(unit);
  if (!rec) throw_invalid("no institution row for unit '" + unit + "'");
  return *rec;
}

std::map<std::string, double> InstitutionTable::wri_points() const {
  std::map<std::string, double> out;
  for (const auto& rec : records_)
    if (rec.wri) out[rec.unit] = rec.wri->point;
  return out;
}

std::map<std::string, double> InstitutionTable::lpri_points() const {
  std::map<std::string, double> out;
  for (const auto& rec : records_)
    if (rec.lpri) out[rec.unit] = rec.lpri->point;
  return out;
}

std::map<std::string, double> InstitutionTable::err_values() const {
  std::map<std::string, double> out;
  for (const auto& rec : records_)
    if (rec.regime) out[rec.unit] = rec.regime->rigidity();
  return out;
}

namespace {

struct HeaderMap {
  std::map<std::string, std::size_t> pos;
  bool has(const std::string& name) const { return pos.count(name) > 0; }
  std::optional<std::string> cell(const std::vector<std::string>& fields,
                                  const std::string& name) const {
    const auto it = pos.find(name);
    if (it == pos.end()) return std::nullopt;
    std::string v = fields[it->second];
    const auto b = v.find_first_not_of(" \t");
    if (b == std::string::npos) return std::nullopt;
    const auto e = v.find_last_not_of(" \t\r");
    v = v.substr(b, e - b + 1);
    if (v.empty()) return std::nullopt;
    return v;
  }
};

}  // namespace

InstitutionTable read_institutions_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw_parse(source_name + ": empty file");
  auto header_fields = split_csv_line(line);
  HeaderMap header;
  for (std::size_t i = 0; i < header_fields.size(); ++i) {
    std::string h = header_fields[i];
    h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
            h.end());
    if (h.empty()) continue;
    if (header.pos.count(h)) throw_parse(source_name + ":1: duplicate column '" + h + "'");
    header.pos[h] = i;
  }
  if (!header.has("unit")) throw_parse(source_name + ":1: missing 'unit' column");
  const bool wri_dims = header.has("wri_d1") || header.has("wri_d2") || header.has("wri_d3");
  if (wri_dims && !(header.has("wri_d1") && header.has("wri_d2") && header.has("wri_d3")))
    throw_parse(source_name + ":1: wri dimension columns must be supplied as wri_d1..wri_d3");
  const bool lpri_dims = header.has("lpri_d1") || header.has("lpri_d2") || header.has("lpri_d3") ||
                         header.has("lpri_d4");
  if (lpri_dims && !(header.has("lpri_d1") && header.has("lpri_d2") && header.has("lpri_d3") &&
                     header.has("lpri_d4")))
    throw_parse(source_name + ":1: lpri dimension columns must be supplied as lpri_d1..lpri_d4");
  const int prob_cols = static_cast<int>(header.has("p_fix")) +
                        static_cast<int>(header.has("p_intermediate")) +
                        static_cast<int>(header.has("p_float"));
  if (prob_cols != 0 && prob_cols != 3)
    throw_parse(source_name + ":1: regime probabilities need all of p_fix,p_intermediate,p_float");

  std::vector<InstitutionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header_fields.size())
      throw_parse(source_name + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header_fields.size()) + " fields, got " +
                  std::to_string(fields.size()));
    const std::string where = source_name + ":" + std::to_string(line_no);

    InstitutionRecord rec;
    const auto unit = header.cell(fields, "unit");
    if (!unit) throw_parse(where + ": empty unit");
    rec.unit = *unit;

    auto number = [&](const std::string& name) -> std::optional<double> {
      const auto raw = header.cell(fields, name);
      if (!raw) return std::nullopt;
      return parse_csv_double(*raw, source_name, line_no, name);
    };

    std::optional<double> wri_total = number("wri");
    if (wri_dims) {
      const auto d1 = number("wri_d1"), d2 = number("wri_d2"), d3 = number("wri_d3");
      if (d1 || d2 || d3) {
        if (!(d1 && d2 && d3)) throw_parse(where + ": incomplete wri dimension scores");
        double total;
        try {
          total = compute_wri({*d1, *d2, *d3});
        } catch (const Error& e) {
          throw Error(e.code(), where + ": " + e.what());
        }
        if (wri_total && std::abs(*wri_total - total) > 1e-9)
          throw_parse(where + ": wri total " + format_double(*wri_total) +
                      " inconsistent with dimension sum " + format_double(total));
        wri_total = total;
      }
    }
    if (wri_total) {
      try {
        rec.wri = wri_with_band(*wri_total, number("wri_band").value_or(0.0));
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
    } else if (number("wri_band")) {
      throw_parse(where + ": wri_band given without a wri value");
    }

    std::optional<double> lpri_total = number("lpri");
    if (lpri_dims) {
      const auto d1 = number("lpri_d1"), d2 = number("lpri_d2");
      const auto d3 = number("lpri_d3"), d4 = number("lpri_d4");
      if (d1 || d2 || d3 || d4) {
        if (!(d1 && d2 && d3 && d4)) throw_parse(where + ": incomplete lpri dimension scores");
        double total;
        try {
          total = compute_lpri({*d1, *d2, *d3, *d4});
        } catch (const Error& e) {
          throw Error(e.code(), where + ": " + e.what());
        }
        if (lpri_total && std::abs(*lpri_total - total) > 1e-9)
          throw_parse(where + ": lpri total " + format_double(*lpri_total) +
                      " inconsistent with dimension sum " + format_double(total));
        lpri_total = total;
      }
    }
    if (lpri_total) {
      try {
        rec.lpri = lpri_with_band(*lpri_total, number("lpri_band").value_or(0.0));
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
    } else if (number("lpri_band")) {
      throw_parse(where + ": lpri_band given without an lpri value");
    }

    const auto code_raw = header.cell(fields, "err_code");
    if (code_raw) {
      const int code = parse_csv_int(*code_raw, source_name, line_no, "err_code");
      RegimeAssignment a;
      const auto pf = number("p_fix"), pi = number("p_intermediate"), pl = number("p_float");
      if (pf || pi || pl) {
        if (!(pf && pi && pl)) throw_parse(where + ": incomplete regime probabilities");
        a.code = code;
        a.probabilities = {*pf, *pi, *pl};
      } else {
        try {
          a = RegimeAssignment::from_code(code);
        } catch (const Error& e) {
          throw Error(e.code(), where + ": " + e.what());
        }
      }
      try {
        a.validate("regime");
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
      rec.regime = a;
    } else if (number("p_fix") || number("p_intermediate") || number("p_float")) {
      throw_parse(where + ": regime probabilities given without err_code");
    }

    records.push_back(std::move(rec));
  }
  try {
    return InstitutionTable(std::move(records));
  } catch (const Error& e) {
    throw Error(e.code(), source_name + ": " + e.what());
  }
}

InstitutionTable read_institutions_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "'");
  return read_institutions_csv(in, path);
}

void write_institutions_csv(std::ostream& out, const InstitutionTable& table) {
  out << "unit,wri,wri_band,lpri,lpri_band,err_code,p_fix,p_intermediate,p_float\n";
  for (const auto& rec : table.records()) {
    out << rec.unit << ',';
    if (rec.wri) out << format_double(rec.wri->point);
    out << ',';
    if (rec.wri) out << format_double(rec.wri->band);
    out << ',';
    if (rec.lpri) out << format_double(rec.lpri->point);
    out << ',';
    if (rec.lpri) out << format_double(rec.lpri->band);
    out << ',';
    if (rec.regime) out << rec.regime->code;
    out << ',';
    if (rec.regime) out << format_double(rec.regime->probabilities[0]);
    out << ',';
    if (rec.regime) out << format_double(rec.regime->probabilities[1]);
    out << ',';
    if (rec.regime) out << format_double(rec.regime->probabilities[2]);
    out << '\n';
  }
}

void write_institutions_csv_file(const std::string& path, const InstitutionTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  write_institutions_csv(out, table);
  if (!out.good()) throw_io("write failed for '" + path + "'");
}

}  // namespace ipdyn
