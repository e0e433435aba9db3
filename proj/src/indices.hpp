#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipdyn {

// Wage rigidity: three legal dimensions, each scored 0-2, additive total 0-6.
struct WriScores {
  double d1 = 0, d2 = 0, d3 = 0;
};
double compute_wri(const WriScores& s);

// Labour protection rigidity: four dimensions, each 0-2.5, additive total 0-10.
struct LpriScores {
  double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
};
double compute_lpri(const LpriScores& s);

// De facto regime code 1=fix, 2=intermediate, 3=free float, inverted so that
// higher = more rigid: fix -> 3, intermediate -> 2, float -> 1.
double regime_rigidity(int code);

struct IndexWithBand {
  double point = 0;
  double band = 0;  // symmetric half-width
  double domain_min = 0;
  double domain_max = 0;
  void validate(const std::string& what) const;
};

IndexWithBand wri_with_band(double point, double band);
IndexWithBand lpri_with_band(double point, double band);

struct RegimeAssignment {
  int code = 0;
  std::array<double, 3> probabilities{};  // P(true regime = 1, 2, 3)
  static RegimeAssignment from_code(int code);  // 0.8 on code, 0.1 elsewhere
  void validate(const std::string& what) const;
  double rigidity() const { return regime_rigidity(code); }
};

struct InstitutionRecord {
  std::string unit;
  std::optional<IndexWithBand> wri;
  std::optional<IndexWithBand> lpri;
  std::optional<RegimeAssignment> regime;
};

class InstitutionTable {
 public:
  InstitutionTable() = default;
  explicit InstitutionTable(std::vector<InstitutionRecord> records);

  const std::vector<InstitutionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const InstitutionRecord* find(const std::string& unit) const;
  const InstitutionRecord& at(const std::string& unit) const;

  // Per-unit value maps for building interaction series; units lacking the
  // field are simply absent (their interaction cells come out missing).
  std::map<std::string, double> wri_points() const;
  std::map<std::string, double> lpri_points() const;
  std::map<std::string, double> err_values() const;

 private:
  std::vector<InstitutionRecord> records_;
};

// Two accepted headers: totals (`unit,wri,wri_band,lpri,lpri_band,err_code
// [,p_fix,p_intermediate,p_float]`) or dimension scores (`unit,wri_d1..d3,
// lpri_d1..d4,...`). Totals are computed from dimensions when supplied; if
// both appear they must agree to 1e-9. Every institutional column is
// optional apart from `unit`.
InstitutionTable read_institutions_csv(std::istream& in, const std::string& source_name);
InstitutionTable read_institutions_csv_file(const std::string& path);

void write_institutions_csv(std::ostream& out, const InstitutionTable& table);
void write_institutions_csv_file(const std::string& path, const InstitutionTable& table);

}  // namespace ipdyn
