#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "dgp.hpp"
#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"

using namespace ipdyn;

namespace {

std::string panel_text(const PanelDataset& p) {
  std::ostringstream out;
  write_panel_csv(out, p);
  return out.str();
}

}  // namespace

TEST_CASE("substreams are reproducible and distinct") {
  Rng a = Rng::substream(7, 3);
  Rng b = Rng::substream(7, 3);
  Rng c = Rng::substream(7, 4);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  Rng a2 = Rng::substream(7, 3);
  for (int i = 0; i < 16; ++i) differs = differs || (a2.next_u64() != c.next_u64());
  CHECK(differs);

  Rng u = Rng::substream(7, 5);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  Rng cat(9);
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 3000; ++i) ++counts[cat.categorical3({0.2, 0.3, 0.5})];
  CHECK(counts[0] == 0);
  CHECK(counts[1] > 450);   // ~600
  CHECK(counts[2] > 700);   // ~900
  CHECK(counts[3] > 1300);  // ~1500
}

TEST_CASE("generation is a pure function of the parameters") {
  DgpParams p;
  p.n_units = 10;
  p.n_periods = 6;
  p.seed = 12345;
  p.control_laws = {{"import_prices", {0.0, 0.1}}};
  p.beta = {{"import_prices", 2.0}};
  auto [panel1, truth1] = generate(p);
  auto [panel2, truth2] = generate(p);
  CHECK(panel_text(panel1) == panel_text(panel2));
  CHECK(truth1.alpha == truth2.alpha);
  CHECK(truth1.wri == truth2.wri);
  CHECK(truth1.regime == truth2.regime);

  DgpParams q = p;
  q.seed = 54321;
  auto [panel3, truth3] = generate(q);
  CHECK(panel_text(panel3) != panel_text(panel1));

  // Per-unit substreams: adding units leaves the existing ones untouched.
  DgpParams wider = p;
  wider.n_units = 12;
  auto [panel4, truth4] = generate(wider);
  for (std::size_t u = 0; u < 10; ++u) {
    CHECK(truth4.alpha[u] == truth1.alpha[u]);
    CHECK(truth4.wri[u] == truth1.wri[u]);
    CHECK(truth4.regime[u] == truth1.regime[u]);
  }
  for (int year = 2013; year < 2013 + 6; ++year)
    CHECK(*panel4.at("inflation", "c003", year) == *panel1.at("inflation", "c003", year));
}

TEST_CASE("panel layout and naming") {
  DgpParams p;
  p.n_units = 10;
  p.n_periods = 4;
  p.first_year = 1999;
  p.control_laws = {{"gdp_growth", {2.0, 1.0}}, {"energy_prices", {0.0, 0.3}}};
  auto [panel, truth] = generate(p);
  CHECK(panel.n_rows() == 40);
  CHECK(panel.n_units() == 10);
  CHECK(panel.years() == std::vector<int>{1999, 2000, 2001, 2002});
  // Controls follow "inflation" in sorted order.
  CHECK(panel.column_names() ==
        std::vector<std::string>{"inflation", "energy_prices", "gdp_growth"});
  CHECK(truth.units.front() == "c001");
  CHECK(truth.units.back() == "c010");
  CHECK(truth.years == std::vector<int>{1999, 2000, 2001, 2002});
  CHECK(truth.lambda == std::vector<double>(4, 0.0));
}

TEST_CASE("noiseless dynamics decay geometrically") {
  DgpParams p;
  p.n_units = 3;
  p.n_periods = 5;
  p.sigma_eps = 0.0;
  p.sigma_alpha = 0.0;
  p.burn_in = 0;
  p.rho0 = 0.5;
  auto [panel, truth] = generate(p);
  for (const auto& unit : truth.units) {
    for (int year = 2013; year < 2017; ++year) {
      const double now = *panel.at("inflation", unit, year);
      const double next = *panel.at("inflation", unit, year + 1);
      CHECK(next == doctest::Approx(0.5 * now).epsilon(1e-12));
    }
    CHECK(*panel.at("inflation", unit, 2013) != 0.0);  // nonzero start state
  }
}

TEST_CASE("true persistence honors the interaction structure") {
  DgpParams p;
  p.n_units = 40;
  p.n_periods = 3;
  p.rho0 = 0.8;
  p.rho1 = -0.1;
  p.rho2 = -0.05;
  p.wri_min = 1.0;
  p.wri_max = 4.0;
  auto [panel, truth] = generate(p);
  for (std::size_t u = 0; u < truth.units.size(); ++u) {
    CHECK(truth.wri[u] >= 1.0);
    CHECK(truth.wri[u] <= 4.0);
    CHECK(truth.regime[u] >= 1);
    CHECK(truth.regime[u] <= 3);
    const double want =
        0.8 - 0.1 * truth.wri[u] - 0.05 * (4.0 - truth.regime[u]);
    CHECK(truth.effective_rho[u] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("explosive parameterizations are refused") {
  DgpParams p;
  p.rho0 = 1.2;
  try {
    generate(p);
    FAIL("expected a stationarity error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("stationarity violated") != std::string::npos);
    CHECK(std::string(e.what()).find("c00") != std::string::npos);  // names offenders
  }
}

TEST_CASE("fixed year shocks pass straight through") {
  DgpParams p;
  p.n_units = 4;
  p.n_periods = 3;
  p.sigma_eps = 0.0;
  p.sigma_alpha = 0.0;
  p.burn_in = 0;
  p.rho0 = 0.0;
  p.lambda_mode = LambdaMode::fixed;
  p.lambda_values = {1.5, -0.5, 2.25};
  auto [panel, truth] = generate(p);
  CHECK(truth.lambda == p.lambda_values);
  for (const auto& unit : truth.units) {
    CHECK(*panel.at("inflation", unit, 2014) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(*panel.at("inflation", unit, 2015) == doctest::Approx(2.25).epsilon(1e-12));
  }

  DgpParams bad = p;
  bad.lambda_values = {1.0};
  CHECK_THROWS_AS(generate(bad), Error);

  DgpParams random = p;
  random.lambda_mode = LambdaMode::random;
  random.sigma_lambda = 0.5;
  random.lambda_values.clear();
  auto [rp, rt] = generate(random);
  bool nonzero = false;
  for (double v : rt.lambda) nonzero = nonzero || v != 0.0;
  CHECK(nonzero);
}

TEST_CASE("controls feed the outcome through their betas") {
  DgpParams p;
  p.n_units = 5;
  p.n_periods = 6;
  p.sigma_eps = 0.0;
  p.sigma_alpha = 0.0;
  p.burn_in = 0;
  p.rho0 = 0.0;
  p.control_laws = {{"energy", {0.0, 0.4}}, {"gdp", {2.5, 1.0}}};
  p.beta = {{"energy", 6.0}, {"gdp", -0.4}};
  auto [panel, truth] = generate(p);
  for (const auto& unit : truth.units)
    for (int year = 2013; year < 2019; ++year) {
      const double want = 6.0 * *panel.at("energy", unit, year) +
                          -0.4 * *panel.at("gdp", unit, year);
      CHECK(*panel.at("inflation", unit, year) == doctest::Approx(want).epsilon(1e-12));
    }

  // Law means are respected on average.
  double gdp_mean = 0.0;
  for (const auto& unit : truth.units)
    for (int year = 2013; year < 2019; ++year) gdp_mean += *panel.at("gdp", unit, year);
  gdp_mean /= 30.0;
  CHECK(std::fabs(gdp_mean - 2.5) < 0.8);
}

TEST_CASE("institution export carries bands and classification confidence") {
  DgpParams p;
  p.n_units = 6;
  p.n_periods = 3;
  p.wri_band = 0.75;
  p.regime_confidence = 0.8;
  auto [panel, truth] = generate(p);
  const InstitutionTable table = institutions_from_truth(truth);
  CHECK(table.size() == 6);
  for (std::size_t u = 0; u < truth.units.size(); ++u) {
    const InstitutionRecord& rec = table.at(truth.units[u]);
    CHECK(rec.wri->point == truth.wri[u]);
    CHECK(rec.wri->band == 0.75);
    CHECK(rec.regime->code == truth.regime[u]);
    CHECK(rec.regime->probabilities[static_cast<std::size_t>(truth.regime[u] - 1)] ==
          doctest::Approx(0.8));
    double sum = 0.0;
    for (double prob : rec.regime->probabilities) sum += prob;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!rec.lpri.has_value());
  }
}

TEST_CASE("missingness injection blanks cells at the requested rate") {
  DgpParams p;
  p.n_units = 20;
  p.n_periods = 10;
  auto [panel, truth] = generate(p);

  Rng keep = Rng::substream(99, 0x50000);
  const PanelDataset same = inject_missingness(panel, 0.0, keep);
  CHECK(panel_text(same) == panel_text(panel));

  Rng rng1 = Rng::substream(99, 0x50000);
  const PanelDataset holed1 = inject_missingness(panel, 0.3, rng1);
  Rng rng2 = Rng::substream(99, 0x50000);
  const PanelDataset holed2 = inject_missingness(panel, 0.3, rng2);
  CHECK(panel_text(holed1) == panel_text(holed2));

  std::size_t missing = 0;
  for (const auto& cell : holed1.column("inflation"))
    if (!cell) ++missing;
  const double rate = static_cast<double>(missing) / 200.0;
  CHECK(rate > 0.2);
  CHECK(rate < 0.4);

  Rng r3(1);
  CHECK_THROWS_AS(inject_missingness(panel, 1.0, r3), Error);
  CHECK_THROWS_AS(inject_missingness(panel, -0.1, r3), Error);
}

TEST_CASE("truth export names every parameter and unit") {
  DgpParams p;
  p.n_units = 2;
  p.n_periods = 2;
  p.rho0 = 0.5;
  p.rho1 = -0.125;
  p.control_laws = {{"gdp", {2.82, 4.28}}};
  p.beta = {{"gdp", -0.4}};
  auto [panel, truth] = generate(p);
  std::ostringstream out;
  write_truth_csv(out, truth);
  const std::string text = out.str();
  CHECK(text.find("kind,name,unit,value\n") == 0);
  CHECK(text.find("param,rho0,,0.5\n") != std::string::npos);
  CHECK(text.find("param,rho1,,-0.125\n") != std::string::npos);
  CHECK(text.find("param,beta.gdp,,-0.4\n") != std::string::npos);
  CHECK(text.find("param,control.gdp.mean,,2.82\n") != std::string::npos);
  CHECK(text.find("alpha,,c001,") != std::string::npos);
  CHECK(text.find("wri,,c002,") != std::string::npos);
  CHECK(text.find("effective_rho,,c002,") != std::string::npos);
  CHECK(text.find("lambda,2013,,0\n") != std::string::npos);
}

TEST_CASE("parameter validation catches malformed laws") {
  DgpParams ok;
  DgpParams p = ok;
  p.n_units = 0;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.burn_in = -1;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.sigma_eps = -1;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.wri_min = 4;
  p.wri_max = 2;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.wri_max = 7;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.regime_probs = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.beta = {{"ghost", 1.0}};
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.control_laws = {{"inflation", {0, 1}}};
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.control_laws = {{"x", {0, -1}}};
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.wri_band = -0.5;
  CHECK_THROWS_AS(generate(p), Error);
  p = ok;
  p.regime_confidence = 0.0;
  CHECK_THROWS_AS(generate(p), Error);
}
