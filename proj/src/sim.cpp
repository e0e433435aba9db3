#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "gmm.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace ipdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double diagnostic_p(const EstimationResult& r, const std::string& name) {
  const Diagnostic* d = r.diagnostic(name);
  return d ? d->p_value : kNaN;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

const char* target_tag(PerturbTarget t) {
  switch (t) {
    case PerturbTarget::wri:
    case PerturbTarget::both:
      return "wri";
    case PerturbTarget::lpri:
      return "lpri";
    case PerturbTarget::regime:
      return "err";
  }
  return "wri";
}

}  // namespace

double draw_index_value(const IndexWithBand& index, BandDistribution distribution, Rng& rng) {
  double v = distribution == BandDistribution::uniform
                 ? rng.uniform(index.point - index.band, index.point + index.band)
                 : rng.normal(index.point, index.band / 2.0);
  if (v < index.domain_min) v = index.domain_min;
  if (v > index.domain_max) v = index.domain_max;
  return v;
}

int draw_regime(const RegimeAssignment& assignment, Rng& rng) {
  return rng.categorical3(assignment.probabilities);
}

std::pair<SimulationSummary, std::vector<DrawRecord>> run_uncertainty(
    const PanelDataset& raw, const InstitutionTable& institutions, const ModelConfig& model,
    const InteractionSet& interactions, const UncertaintySpec& spec) {
  if (spec.reps < 1) throw_invalid("reps must be >= 1");
  if (!(spec.significance_level > 0 && spec.significance_level < 1))
    throw_invalid("significance level must be in (0, 1)");
  const bool perturb_wri = spec.target == PerturbTarget::wri || spec.target == PerturbTarget::both;
  const bool perturb_lpri = spec.target == PerturbTarget::lpri;
  const bool perturb_regime =
      spec.target == PerturbTarget::regime || spec.target == PerturbTarget::both;

  const auto& records = institutions.records();

  auto fit_with = [&](const std::map<std::string, double>& wri,
                      const std::map<std::string, double>& lpri,
                      const std::map<std::string, double>& err,
                      std::string* track_name) -> EstimationResult {
    BuiltModel m = build_model(raw, model, interactions, wri, lpri, err);
    if (track_name && track_name->empty()) {
      const auto it = m.interaction_names.find(target_tag(spec.target));
      if (it == m.interaction_names.end())
        throw_invalid(std::string("simulation target needs the '") + target_tag(spec.target) +
                      "' interaction in the model");
      *track_name = it->second;
    }
    return fit_gmm(m.data, m.gmm);
  };

  std::string track = spec.track;
  const EstimationResult baseline = [&] {
    try {
      return fit_with(institutions.wri_points(), institutions.lpri_points(),
                      institutions.err_values(), &track);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("baseline fit failed: ") + e.what());
    }
  }();
  if (!baseline.has_coefficient(track))
    throw_invalid("tracked coefficient '" + track + "' is not in the fitted model");

  std::vector<DrawRecord> draws(static_cast<std::size_t>(spec.reps));
  parallel_for(static_cast<std::size_t>(spec.reps), spec.threads, [&](std::size_t slot) {
    DrawRecord& rec = draws[slot];
    rec.draw_index = static_cast<int>(slot) + 1;
    Rng rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(rec.draw_index));

    std::map<std::string, double> wri, lpri, err;
    rec.wri.assign(records.size(), kNaN);
    rec.lpri.assign(records.size(), kNaN);
    rec.regime.assign(records.size(), 0);
    for (std::size_t j = 0; j < records.size(); ++j) {
      const InstitutionRecord& r = records[j];
      if (r.wri) {
        const double v =
            perturb_wri ? draw_index_value(*r.wri, spec.distribution, rng) : r.wri->point;
        wri[r.unit] = v;
        rec.wri[j] = v;
      }
      if (r.lpri) {
        const double v =
            perturb_lpri ? draw_index_value(*r.lpri, spec.distribution, rng) : r.lpri->point;
        lpri[r.unit] = v;
        rec.lpri[j] = v;
      }
      if (r.regime) {
        const int code = perturb_regime ? draw_regime(*r.regime, rng) : r.regime->code;
        err[r.unit] = regime_rigidity(code);
        rec.regime[j] = code;
      }
    }

    try {
      const EstimationResult fit = fit_with(wri, lpri, err, nullptr);
      rec.coefficient = fit.coefficient(track);
      rec.standard_error = fit.standard_error(track);
      rec.p_value = normal_two_sided_p(rec.coefficient / rec.standard_error);
      rec.ar2_p = diagnostic_p(fit, "ar2");
      rec.hansen_p = diagnostic_p(fit, "hansen");
      rec.converged = true;
    } catch (const std::exception& e) {
      rec.converged = false;
      rec.coefficient = rec.standard_error = rec.p_value = rec.ar2_p = rec.hansen_p = kNaN;
      rec.error = e.what();
    }
  });

  SimulationSummary summary = summarize(draws, spec.significance_level);
  summary.baseline_coefficient = baseline.coefficient(track);
  summary.baseline_se = baseline.standard_error(track);
  summary.baseline_ar2_p = diagnostic_p(baseline, "ar2");
  summary.baseline_hansen_p = diagnostic_p(baseline, "hansen");
  return {summary, std::move(draws)};
}

SimulationSummary summarize(const std::vector<DrawRecord>& draws, double significance_level) {
  if (!(significance_level > 0 && significance_level < 1))
    throw_invalid("significance level must be in (0, 1)");
  SimulationSummary s;
  s.significance_level = significance_level;
  s.reps = static_cast<long>(draws.size());

  std::vector<double> coefs, ar2_ps, hansen_ps;
  long positive = 0, negative_significant = 0;
  for (const DrawRecord& d : draws) {
    if (!d.converged) {
      ++s.failures;
      continue;
    }
    coefs.push_back(d.coefficient);
    if (d.coefficient > 0) ++positive;
    if (d.coefficient < 0 && d.p_value < significance_level) ++negative_significant;
    if (!std::isnan(d.ar2_p)) ar2_ps.push_back(d.ar2_p);
    if (!std::isnan(d.hansen_p)) hansen_ps.push_back(d.hansen_p);
  }
  s.converged = static_cast<long>(coefs.size());
  if (s.converged == 0) throw_estimation("no converged simulation draws to summarize");

  const auto [min_it, max_it] = std::minmax_element(coefs.begin(), coefs.end());
  if (*min_it == *max_it) {
    // Degenerate distribution: report the common value exactly rather than
    // letting n additions round it (the zero-band fixed point is bit-exact).
    s.mean = *min_it;
    s.sd = 0.0;
  } else {
    double sum = 0;
    for (double c : coefs) sum += c;
    s.mean = sum / static_cast<double>(coefs.size());
    double ss = 0;
    for (double c : coefs) ss += (c - s.mean) * (c - s.mean);
    s.sd = coefs.size() > 1 ? std::sqrt(ss / static_cast<double>(coefs.size() - 1)) : 0.0;
  }
  s.median = median_of(coefs);
  s.share_positive = static_cast<double>(positive) / static_cast<double>(s.converged);
  s.share_nonpositive = 1.0 - s.share_positive;
  s.share_negative_significant =
      static_cast<double>(negative_significant) / static_cast<double>(s.converged);
  s.ar2_p_summary = median_of(std::move(ar2_ps));
  s.hansen_p_summary = median_of(std::move(hansen_ps));
  return s;
}

}  // namespace ipdyn
