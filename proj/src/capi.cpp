#include "ipdyn/ipdyn.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "fe.hpp"
#include "gmm.hpp"
#include "indices.hpp"
#include "model.hpp"
#include "panel.hpp"
#include "runner.hpp"
#include "version.hpp"

struct ipdyn_config {
  ipdyn::Config impl;
};
struct ipdyn_panel {
  ipdyn::PanelDataset impl;
};
struct ipdyn_institutions {
  ipdyn::InstitutionTable impl;
};
struct ipdyn_fit {
  ipdyn::EstimationResult impl;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ipdyn_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return IPDYN_OK;
  } catch (const ipdyn::Error& e) {
    g_last_error = e.what();
    return static_cast<ipdyn_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IPDYN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IPDYN_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) ipdyn::throw_invalid(std::string("null argument: ") + what);
}

void copy_out(const std::string& value, char* buf, size_t buf_size, size_t* out_len) {
  if (out_len) *out_len = value.size();
  if (buf && buf_size > 0) {
    const size_t n = value.size() < buf_size - 1 ? value.size() : buf_size - 1;
    std::memcpy(buf, value.data(), n);
    buf[n] = '\0';
  }
}

}  // namespace

extern "C" {

const char* ipdyn_version(void) { return ipdyn::kVersion; }

const char* ipdyn_last_error(void) { return g_last_error.c_str(); }

ipdyn_config* ipdyn_config_new(void) { return new (std::nothrow) ipdyn_config{}; }

ipdyn_status ipdyn_config_load(const char* path, ipdyn_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ipdyn_config{ipdyn::Config::from_file(path)};
  });
}

ipdyn_status ipdyn_config_parse(const char* text, ipdyn_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ipdyn_config{ipdyn::Config::parse(text)};
  });
}

ipdyn_status ipdyn_config_set(ipdyn_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    cfg->impl.set(key, std::string(value));
  });
}

ipdyn_status ipdyn_config_get(const ipdyn_config* cfg, const char* key, char* buf, size_t buf_size,
                              size_t* out_len) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    const auto value = cfg->impl.get(key);
    if (!value) ipdyn::throw_invalid(std::string("config has no key '") + key + "'");
    copy_out(*value, buf, buf_size, out_len);
  });
}

ipdyn_status ipdyn_config_apply_env(ipdyn_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->impl.apply_env();
  });
}

ipdyn_status ipdyn_config_echo(const ipdyn_config* cfg, char* buf, size_t buf_size,
                               size_t* out_len) {
  return guarded([&] {
    require(cfg, "cfg");
    copy_out(cfg->impl.echo(), buf, buf_size, out_len);
  });
}

void ipdyn_config_free(ipdyn_config* cfg) { delete cfg; }

ipdyn_status ipdyn_run(const char* command, const ipdyn_config* cfg) {
  return guarded([&] {
    require(command, "command");
    require(cfg, "cfg");
    ipdyn::run_command(command, cfg->impl);
  });
}

ipdyn_status ipdyn_panel_load(const char* path, ipdyn_panel** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ipdyn_panel{ipdyn::read_panel_csv_file(path)};
  });
}

ipdyn_status ipdyn_panel_n_rows(const ipdyn_panel* panel, size_t* out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    *out = panel->impl.n_rows();
  });
}

ipdyn_status ipdyn_panel_n_units(const ipdyn_panel* panel, size_t* out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    *out = panel->impl.n_units();
  });
}

void ipdyn_panel_free(ipdyn_panel* panel) { delete panel; }

ipdyn_status ipdyn_institutions_load(const char* path, ipdyn_institutions** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ipdyn_institutions{ipdyn::read_institutions_csv_file(path)};
  });
}

ipdyn_status ipdyn_institutions_count(const ipdyn_institutions* table, size_t* out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = table->impl.size();
  });
}

void ipdyn_institutions_free(ipdyn_institutions* table) { delete table; }

ipdyn_status ipdyn_fit_model(const ipdyn_panel* panel, const ipdyn_institutions* institutions,
                             const ipdyn_config* cfg, const char* estimator, ipdyn_fit** out) {
  return guarded([&] {
    require(panel, "panel");
    require(cfg, "cfg");
    require(estimator, "estimator");
    require(out, "out");
    const std::string method(estimator);
    if (method != "fe" && method != "gmm")
      ipdyn::throw_invalid("estimator must be \"fe\" or \"gmm\", got \"" + method + "\"");

    const ipdyn::ModelConfig mcfg = ipdyn::model_from(cfg->impl);
    const ipdyn::InteractionSet set =
        ipdyn::interactions_from_tags(cfg->impl.get_list("model.interactions", {"none"}));
    if (set.any() && !institutions)
      ipdyn::throw_invalid("the requested interactions need an institutions table");
    const std::map<std::string, double> wri =
        institutions ? institutions->impl.wri_points() : std::map<std::string, double>{};
    const std::map<std::string, double> lpri =
        institutions ? institutions->impl.lpri_points() : std::map<std::string, double>{};
    const std::map<std::string, double> err =
        institutions ? institutions->impl.err_values() : std::map<std::string, double>{};

    const ipdyn::BuiltModel m = ipdyn::build_model(panel->impl, mcfg, set, wri, lpri, err);
    ipdyn::EstimationResult result =
        method == "fe" ? ipdyn::fit_fe(m.data, m.fe) : ipdyn::fit_gmm(m.data, m.gmm);
    *out = new ipdyn_fit{std::move(result)};
  });
}

ipdyn_status ipdyn_fit_coefficient_count(const ipdyn_fit* fit, size_t* out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = fit->impl.names.size();
  });
}

ipdyn_status ipdyn_fit_coefficient_name(const ipdyn_fit* fit, size_t index, char* buf,
                                        size_t buf_size, size_t* out_len) {
  return guarded([&] {
    require(fit, "fit");
    if (index >= fit->impl.names.size())
      ipdyn::throw_invalid("coefficient index " + std::to_string(index) + " out of range");
    copy_out(fit->impl.names[index], buf, buf_size, out_len);
  });
}

ipdyn_status ipdyn_fit_coefficient(const ipdyn_fit* fit, const char* name, double* out) {
  return guarded([&] {
    require(fit, "fit");
    require(name, "name");
    require(out, "out");
    *out = fit->impl.coefficient(name);
  });
}

ipdyn_status ipdyn_fit_standard_error(const ipdyn_fit* fit, const char* name, double* out) {
  return guarded([&] {
    require(fit, "fit");
    require(name, "name");
    require(out, "out");
    *out = fit->impl.standard_error(name);
  });
}

ipdyn_status ipdyn_fit_diagnostic(const ipdyn_fit* fit, const char* name, double* statistic,
                                  double* p_value) {
  return guarded([&] {
    require(fit, "fit");
    require(name, "name");
    const ipdyn::Diagnostic* d = fit->impl.diagnostic(name);
    if (!d) ipdyn::throw_invalid(std::string("no diagnostic named '") + name + "'");
    if (statistic) *statistic = d->statistic;
    if (p_value) *p_value = d->p_value;
  });
}

ipdyn_status ipdyn_fit_n_obs(const ipdyn_fit* fit, long* out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = fit->impl.n_obs;
  });
}

ipdyn_status ipdyn_fit_n_units(const ipdyn_fit* fit, long* out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = fit->impl.n_units;
  });
}

void ipdyn_fit_free(ipdyn_fit* fit) { delete fit; }

}  // extern "C"
