#include "fmpp/fmpp.h"

#include <cmath>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "fmpp/catalog.hpp"
#include "fmpp/config.hpp"
#include "fmpp/errors.hpp"
#include "fmpp/experiment.hpp"
#include "fmpp/intensity.hpp"
#include "fmpp/pattern_io.hpp"
#include "fmpp/rltest.hpp"
#include "fmpp/simulate.hpp"
#include "fmpp/summaries.hpp"
#include "fmpp/version.hpp"

using nlohmann::json;

struct fmpp_pattern {
  fmpp::MarkedPointPattern value;
};

struct fmpp_intensity {
  fmpp::IntensityEstimate value;
};

namespace {

thread_local std::string g_last_error;

fmpp_status set_error(fmpp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

fmpp_status status_of(const fmpp::Error& e) {
  switch (e.kind()) {
    case fmpp::ErrorKind::Invalid: return FMPP_E_INVALID;
    case fmpp::ErrorKind::Io: return FMPP_E_IO;
    case fmpp::ErrorKind::Internal: return FMPP_E_INTERNAL;
  }
  return FMPP_E_INTERNAL;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message. Every exported function body goes through here.
template <typename Fn>
fmpp_status guarded(Fn&& fn) {
  try {
    fn();
    return FMPP_OK;
  } catch (const fmpp::Error& e) {
    return set_error(status_of(e), e.what());
  } catch (const std::exception& e) {
    return set_error(FMPP_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(FMPP_E_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

void put_string(char** slot, const std::string& text) {
  if (slot) *slot = copy_string(text);
}

fmpp_status need(const void* p, const char* what) {
  if (p) return FMPP_OK;
  return set_error(FMPP_E_INVALID, std::string("null ") + what);
}

std::string text_or_empty(const char* s) { return s ? std::string(s) : std::string(); }

// Reports include a timings object only when the config asks for it, so
// repeated runs stay byte-identical by default.
bool emit_timings(const char* config_json) {
  if (!config_json || !*config_json) return false;
  try {
    auto parsed = json::parse(config_json);
    return parsed.is_object() && parsed.value("emit_timings", false);
  } catch (...) {
    return false;
  }
}

// Analysis configs reuse the local-test schema; irrelevant fields ignored.
fmpp::KConfig k_config_from(const fmpp::LocalTestConfig& config) {
  fmpp::KConfig kc;
  kc.n = config.n;
  kc.testfun = config.testfun;
  kc.edge = config.edge;
  kc.r_max = config.r_max;
  kc.mark_sets = config.mark_sets;
  return kc;
}

fmpp::IntensityEstimate resolve_intensity(const fmpp::MarkedPointPattern& pattern,
                                          const fmpp::LocalTestConfig& config) {
  if (config.intensity == fmpp::IntensityModel::Constant)
    return fmpp::IntensityEstimate::constant(pattern);
  double h = config.bandwidth.cvl
                 ? fmpp::cvl_select_bandwidth(pattern,
                                              fmpp::default_bandwidth_grid(pattern.window()))
                 : config.bandwidth.fixed;
  return fmpp::IntensityEstimate::kernel(pattern, h);
}

}  // namespace

extern "C" {

const char* fmpp_version(void) { return fmpp::kVersion; }

const char* fmpp_last_error(void) { return g_last_error.c_str(); }

void fmpp_string_free(char* text) { delete[] text; }

void fmpp_pattern_free(fmpp_pattern* pattern) { delete pattern; }

void fmpp_intensity_free(fmpp_intensity* intensity) { delete intensity; }

fmpp_status fmpp_pattern_read(const char* csv_path, const char* sidecar_path,
                              fmpp_pattern** out) {
  if (auto s = need(csv_path, "csv_path"); s != FMPP_OK) return s;
  if (auto s = need(sidecar_path, "sidecar_path"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    auto pattern = fmpp::read_pattern(csv_path, sidecar_path);
    *out = new fmpp_pattern{std::move(pattern)};
  });
}

fmpp_status fmpp_pattern_write(const fmpp_pattern* pattern, const char* csv_path,
                               const char* sidecar_path) {
  return fmpp_pattern_write_ex(pattern, csv_path, sidecar_path, nullptr);
}

fmpp_status fmpp_pattern_write_ex(const fmpp_pattern* pattern, const char* csv_path,
                                  const char* sidecar_path,
                                  const char* covariates_json) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(csv_path, "csv_path"); s != FMPP_OK) return s;
  if (auto s = need(sidecar_path, "sidecar_path"); s != FMPP_OK) return s;
  return guarded([&] {
    fmpp::write_pattern(pattern->value, csv_path, sidecar_path,
                        text_or_empty(covariates_json));
  });
}

fmpp_status fmpp_pattern_validate(const fmpp_pattern* pattern, char** issues_json) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(issues_json, "issues_json"); s != FMPP_OK) return s;
  return guarded([&] {
    auto report = fmpp::validate(pattern->value);
    json issues = json::array();
    for (const auto& issue : report.issues)
      issues.push_back({{"code", issue.code},
                        {"point_index", issue.point_index},
                        {"message", issue.message}});
    put_string(issues_json, issues.dump());
  });
}

int fmpp_pattern_size(const fmpp_pattern* pattern) {
  return pattern ? pattern->value.size() : -1;
}

fmpp_status fmpp_pattern_window(const fmpp_pattern* pattern, double* x_min,
                                double* x_max, double* y_min, double* y_max) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  const auto& w = pattern->value.window();
  if (x_min) *x_min = w.x_min;
  if (x_max) *x_max = w.x_max;
  if (y_min) *y_min = w.y_min;
  if (y_max) *y_max = w.y_max;
  return FMPP_OK;
}

fmpp_status fmpp_simulate_scenario(const char* scenario_json, uint64_t seed,
                                   fmpp_pattern** out, char** labels_csv) {
  if (auto s = need(scenario_json, "scenario_json"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    auto spec = fmpp::ScenarioSpec::parse(scenario_json);
    auto sim = fmpp::sim_scenario(spec, seed);
    put_string(labels_csv, sim.labels_csv());
    *out = new fmpp_pattern{std::move(sim.pattern)};
  });
}

fmpp_status fmpp_ingest_catalog(const char* events_csv_path,
                                const char* waveforms_csv_path,
                                const char* sidecar_json_path, int resample_to,
                                fmpp_pattern** out, char** covariates_json) {
  if (auto s = need(events_csv_path, "events_csv_path"); s != FMPP_OK) return s;
  if (auto s = need(waveforms_csv_path, "waveforms_csv_path"); s != FMPP_OK) return s;
  if (auto s = need(sidecar_json_path, "sidecar_json_path"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    std::optional<int> target;
    if (resample_to > 0) target = resample_to;
    auto ingested = fmpp::ingest_catalog_files(events_csv_path, waveforms_csv_path,
                                               sidecar_json_path, target);
    put_string(covariates_json, ingested.covariates_json);
    *out = new fmpp_pattern{std::move(ingested.pattern)};
  });
}

fmpp_status fmpp_intensity_constant(const fmpp_pattern* pattern, fmpp_intensity** out) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    *out = new fmpp_intensity{fmpp::IntensityEstimate::constant(pattern->value)};
  });
}

fmpp_status fmpp_intensity_kernel(const fmpp_pattern* pattern, double bandwidth,
                                  fmpp_intensity** out) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    *out = new fmpp_intensity{fmpp::IntensityEstimate::kernel(pattern->value, bandwidth)};
  });
}

fmpp_status fmpp_intensity_cvl(const fmpp_pattern* pattern, fmpp_intensity** out,
                               char** cvl_csv, double* chosen) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(out, "out"); s != FMPP_OK) return s;
  return guarded([&] {
    auto grid = fmpp::default_bandwidth_grid(pattern->value.window());
    std::string csv = "h,cvl\n";
    for (double h : grid)
      csv += fmpp::format_double(h) + "," +
             fmpp::format_double(fmpp::cvl_objective(pattern->value, h)) + "\n";
    double h = fmpp::cvl_select_bandwidth(pattern->value, grid);
    if (chosen) *chosen = h;
    put_string(cvl_csv, csv);
    *out = new fmpp_intensity{fmpp::IntensityEstimate::kernel(pattern->value, h)};
  });
}

double fmpp_intensity_value_at(const fmpp_intensity* intensity, double x, double y) {
  if (!intensity) return std::nan("");
  try {
    return intensity->value.value_at(x, y);
  } catch (...) {
    return std::nan("");
  }
}

namespace {

std::string curve_info_json(const char* type, const fmpp::LocalTestConfig& config,
                            const fmpp::IntensityEstimate& intensity, bool cap_hit) {
  json info;
  info["type"] = type;
  info["version"] = fmpp::kVersion;
  info["config"] = json::parse(fmpp::local_test_config_json(config));
  info["bandwidth"] = intensity.kind() == fmpp::IntensityEstimate::Kind::Kernel
                          ? json(intensity.bandwidth())
                          : json(nullptr);
  info["iso_cap_hit"] = cap_hit;
  return info.dump(2) + "\n";
}

}  // namespace

fmpp_status fmpp_local_k_csv(const fmpp_pattern* pattern, const char* config_json,
                             char** csv, char** info_json) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(csv, "csv"); s != FMPP_OK) return s;
  return guarded([&] {
    auto config = fmpp::parse_local_test_config(text_or_empty(config_json));
    auto intensity = resolve_intensity(pattern->value, config);
    auto curves = fmpp::local_k_all(pattern->value, intensity, k_config_from(config),
                                    config.threads);
    bool cap_hit = false;
    for (const auto& curve : curves) cap_hit = cap_hit || curve.iso_cap_hit;
    put_string(csv, fmpp::curves_to_csv(curves));
    if (info_json)
      put_string(info_json, curve_info_json("localk_report", config, intensity, cap_hit));
  });
}

fmpp_status fmpp_global_k_csv(const fmpp_pattern* pattern, const char* config_json,
                              char** csv, char** info_json) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(csv, "csv"); s != FMPP_OK) return s;
  return guarded([&] {
    auto config = fmpp::parse_local_test_config(text_or_empty(config_json));
    auto intensity = resolve_intensity(pattern->value, config);
    auto curve = fmpp::global_k(pattern->value, intensity, k_config_from(config));
    put_string(csv, fmpp::curve_to_csv(curve));
    if (info_json)
      put_string(info_json,
                 curve_info_json("globalk_report", config, intensity, curve.iso_cap_hit));
  });
}

fmpp_status fmpp_global_test(const fmpp_pattern* pattern, const char* config_json,
                             char** result_json, char** envelope_csv) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(result_json, "result_json"); s != FMPP_OK) return s;
  return guarded([&] {
    auto config = fmpp::parse_local_test_config(text_or_empty(config_json));
    auto result = fmpp::global_random_labelling_test(pattern->value, config);
    put_string(result_json, result.to_json(emit_timings(config_json)));
    put_string(envelope_csv, result.envelope_csv());
  });
}

fmpp_status fmpp_local_test(const fmpp_pattern* pattern, const char* config_json,
                            char** report_json, char** report_csv,
                            char** envelopes_csv) {
  if (auto s = need(pattern, "pattern"); s != FMPP_OK) return s;
  if (auto s = need(report_json, "report_json"); s != FMPP_OK) return s;
  return guarded([&] {
    auto config = fmpp::parse_local_test_config(text_or_empty(config_json));
    if (envelopes_csv) config.keep_envelopes = true;
    auto report = fmpp::local_random_labelling_test(pattern->value, config);
    put_string(report_json, report.to_json(emit_timings(config_json)));
    put_string(report_csv, report.to_csv());
    if (envelopes_csv) put_string(envelopes_csv, report.envelopes_to_csv());
  });
}

fmpp_status fmpp_run_experiment(const char* experiment_json, const char* output_dir,
                                int threads, char** report_json, char** report_csv) {
  if (auto s = need(experiment_json, "experiment_json"); s != FMPP_OK) return s;
  if (auto s = need(report_json, "report_json"); s != FMPP_OK) return s;
  return guarded([&] {
    auto spec = fmpp::ExperimentSpec::parse(experiment_json);
    auto report = fmpp::run_experiment(spec, text_or_empty(output_dir),
                                       threads < 1 ? 1 : threads);
    put_string(report_json, report.to_json(emit_timings(experiment_json)));
    put_string(report_csv, report.to_csv());
  });
}

}  // extern "C"
