// fmpp command line tool. All computation goes through the C API of the
// shared library (fmpp/fmpp.h); this file only parses arguments, assembles
// config JSON and moves bytes between the library and the filesystem.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fmpp/fmpp.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

bool g_json_errors = false;

int exit_code_of(fmpp_status status) {
  switch (status) {
    case FMPP_OK: return kExitOk;
    case FMPP_E_INVALID:
    case FMPP_E_IO: return kExitInvalid;
    default: return kExitInternal;
  }
}

[[noreturn]] void die(fmpp_status status, const std::string& message) {
  if (g_json_errors) {
    json err;
    err["error"] = {{"status", static_cast<int>(status)}, {"message", message}};
    std::cerr << err.dump() << "\n";
  } else {
    std::cerr << "fmpp: error: " << message << "\n";
  }
  std::exit(exit_code_of(status == FMPP_OK ? FMPP_E_INTERNAL : status));
}

void check(fmpp_status status) {
  if (status != FMPP_OK) die(status, fmpp_last_error());
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { fmpp_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct OwnedPattern {
  fmpp_pattern* ptr = nullptr;
  ~OwnedPattern() { fmpp_pattern_free(ptr); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(FMPP_E_IO, "cannot open for writing: " + path);
  out << text;
  if (!out) die(FMPP_E_IO, "write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(FMPP_E_IO, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Flags shared by the analysis subcommands, mapped onto the config JSON.
struct CommonOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  double rmax = 0.0;  // 0 = default
  int q = 39;
  double alpha = 0.1;
  std::string testfun = "lp";
  std::string p = "2";
  std::string bandwidth = "cvl";
  std::string edge = "iso";
  int n = 2;
  std::string intensity = "kernel";
  std::string resampling = "replace";
  bool holm = false;
  bool one_sided = false;
  std::string mark_sets;  // raw JSON
  bool timings = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--rmax", rmax, "largest distance (default: min window side / 4)");
    cmd->add_option("--q", q, "number of Monte Carlo resamples");
    cmd->add_option("--alpha", alpha, "significance level");
    cmd->add_option("--testfun", testfun, "test function: lp|sup|variogram|dlp|one");
    cmd->add_option("--p", p, "test function exponent (number or 'inf')");
    cmd->add_option("--bandwidth", bandwidth, "'cvl' or a fixed kernel bandwidth");
    cmd->add_option("--edge", edge, "edge correction: iso|trans|none");
    cmd->add_option("--n", n, "statistic order: 2|3")->check(CLI::Range(2, 3));
    cmd->add_option("--intensity", intensity, "intensity model: kernel|constant");
    cmd->add_option("--resampling", resampling, "mark resampling: replace|permute");
    cmd->add_flag("--holm", holm, "Holm-Bonferroni adjusted decisions");
    cmd->add_flag("--one-sided", one_sided, "one-sided envelope ranking");
    cmd->add_option("--mark-sets", mark_sets, "mark set predicates (JSON)");
    cmd->add_flag("--timings", timings, "include wall-clock timings in reports");
  }

  static double parse_number(const std::string& text, const char* flag) {
    try {
      std::size_t used = 0;
      double value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return value;
    } catch (const std::exception&) {
      die(FMPP_E_INVALID, std::string("bad numeric value '") + text + "' for " + flag);
    }
  }

  std::string config_json() const {
    json cfg;
    cfg["seed"] = seed;
    cfg["threads"] = threads;
    if (rmax > 0.0) cfg["r_max"] = rmax;
    cfg["q"] = q;
    cfg["alpha"] = alpha;
    json tf;
    tf["kind"] = testfun;
    if (p == "inf" || p == "infinity")
      tf["p"] = "inf";
    else
      tf["p"] = parse_number(p, "--p");
    cfg["testfun"] = tf;
    if (bandwidth == "cvl")
      cfg["bandwidth"] = "cvl";
    else
      cfg["bandwidth"] = parse_number(bandwidth, "--bandwidth");
    cfg["edge"] = edge;
    cfg["n"] = n;
    cfg["intensity"] = intensity;
    cfg["resampling"] = resampling == "permute" ? "without_replacement" : "with_replacement";
    cfg["holm_bonferroni"] = holm;
    cfg["one_sided"] = one_sided;
    if (!mark_sets.empty()) cfg["mark_sets"] = json::parse(mark_sets);
    if (timings) cfg["emit_timings"] = true;
    return cfg.dump();
  }
};

OwnedPattern load_pattern(const std::string& csv, const std::string& sidecar) {
  OwnedPattern pattern;
  check(fmpp_pattern_read(csv.c_str(), sidecar.c_str(), &pattern.ptr));
  OwnedString issues;
  check(fmpp_pattern_validate(pattern.ptr, &issues.ptr));
  if (issues.str() != "[]") die(FMPP_E_INVALID, "invalid pattern: " + issues.str());
  return pattern;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local weighted summary statistics for functional marked point patterns"};
  app.require_subcommand(1);
  app.add_flag("--json-errors", g_json_errors, "machine-readable errors on stderr");
  app.set_version_flag("--version", std::string(fmpp_version()));

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "draw a pattern from a scenario spec");
  std::string sim_scenario_path, sim_prefix;
  CommonOptions sim_opts;
  sim->add_option("--scenario", sim_scenario_path, "ScenarioSpec JSON file")->required();
  sim->add_option("--out-prefix", sim_prefix, "output prefix for .csv/.json/_labels.csv")
      ->required();
  auto* sim_seed_opt = sim->add_option("--seed", sim_opts.seed, "RNG seed (default: the spec's seed field)");
  int sim_threads = 1;
  sim->add_option("--threads", sim_threads, "accepted for interface uniformity");

  // ---- intensity ----
  auto* intens = app.add_subcommand("intensity", "bandwidth selection and CvL curve");
  std::string int_csv, int_sidecar, int_out;
  intens->add_option("--pattern", int_csv, "pattern CSV")->required();
  intens->add_option("--sidecar", int_sidecar, "pattern sidecar JSON")->required();
  intens->add_option("--out", int_out, "CvL curve CSV output path")->required();
  int int_threads = 1;
  intens->add_option("--threads", int_threads, "accepted for interface uniformity");

  // ---- localk ----
  auto* localk = app.add_subcommand("localk", "local summary curves for every point");
  std::string lk_csv, lk_sidecar, lk_out, lk_json;
  CommonOptions lk_opts;
  localk->add_option("--pattern", lk_csv, "pattern CSV")->required();
  localk->add_option("--sidecar", lk_sidecar, "pattern sidecar JSON")->required();
  localk->add_option("--out", lk_out, "curves CSV output path")->required();
  localk->add_option("--out-json", lk_json, "configuration report JSON output path");
  lk_opts.attach(localk);

  // ---- globaltest ----
  auto* gtest = app.add_subcommand("globaltest", "global Monte Carlo test of random labelling");
  std::string gt_csv, gt_sidecar, gt_json, gt_env;
  CommonOptions gt_opts;
  gtest->add_option("--pattern", gt_csv, "pattern CSV")->required();
  gtest->add_option("--sidecar", gt_sidecar, "pattern sidecar JSON")->required();
  gtest->add_option("--out-json", gt_json, "result JSON output path")->required();
  gtest->add_option("--out-envelope", gt_env, "envelope CSV output path");
  gt_opts.attach(gtest);

  // ---- localtest ----
  auto* ltest = app.add_subcommand("localtest", "per-point Monte Carlo test of random labelling");
  std::string lt_csv, lt_sidecar, lt_json, lt_out_csv, lt_env;
  CommonOptions lt_opts;
  ltest->add_option("--pattern", lt_csv, "pattern CSV")->required();
  ltest->add_option("--sidecar", lt_sidecar, "pattern sidecar JSON")->required();
  ltest->add_option("--out-json", lt_json, "report JSON output path")->required();
  ltest->add_option("--out-csv", lt_out_csv, "report CSV output path");
  ltest->add_option("--out-envelopes", lt_env, "per-point envelope CSV output path");
  lt_opts.attach(ltest);

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "replicated scenario study with classification rates");
  std::string exp_spec_path, exp_outdir;
  int exp_threads = 1;
  std::uint64_t exp_seed = 0;
  exp->add_option("--spec", exp_spec_path, "ExperimentSpec JSON file")->required();
  exp->add_option("--outdir", exp_outdir, "output directory")->required();
  exp->add_option("--threads", exp_threads, "worker threads")->check(CLI::PositiveNumber);
  auto* exp_seed_opt = exp->add_option("--seed", exp_seed, "override the spec seed");

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "build a pattern from an event catalog");
  std::string ing_events, ing_waves, ing_sidecar, ing_prefix;
  int ing_resample = 0;
  ingest->add_option("--events", ing_events, "events CSV (id,x,y,...)")->required();
  ingest->add_option("--waveforms", ing_waves, "waveform matrix CSV")->required();
  ingest->add_option("--sidecar", ing_sidecar, "catalog sidecar JSON")->required();
  ingest->add_option("--out-prefix", ing_prefix, "output prefix for .csv/.json")->required();
  ingest->add_option("--resample", ing_resample, "resample waveforms to this many samples");
  int ing_threads = 1;
  ingest->add_option("--threads", ing_threads, "accepted for interface uniformity");

  CLI11_PARSE(app, argc, argv);

  try {
  if (sim->parsed()) {
    std::string scenario = read_file(sim_scenario_path);
    std::uint64_t seed = sim_opts.seed;
    if (sim_seed_opt->count() == 0) {
      json parsed = json::parse(scenario);
      seed = parsed.value("seed", 0ULL);
    }
    OwnedPattern pattern;
    OwnedString labels;
    check(fmpp_simulate_scenario(scenario.c_str(), seed, &pattern.ptr, &labels.ptr));
    check(fmpp_pattern_write(pattern.ptr, (sim_prefix + ".csv").c_str(),
                             (sim_prefix + ".json").c_str()));
    write_file(sim_prefix + "_labels.csv", labels.str());
    std::cout << "points: " << fmpp_pattern_size(pattern.ptr) << "\n";
    return kExitOk;
  }

  if (intens->parsed()) {
    OwnedPattern pattern = load_pattern(int_csv, int_sidecar);
    fmpp_intensity* intensity = nullptr;
    OwnedString curve;
    double chosen = 0.0;
    check(fmpp_intensity_cvl(pattern.ptr, &intensity, &curve.ptr, &chosen));
    fmpp_intensity_free(intensity);
    write_file(int_out, curve.str());
    std::printf("bandwidth: %.17g\n", chosen);
    return kExitOk;
  }

  if (localk->parsed()) {
    OwnedPattern pattern = load_pattern(lk_csv, lk_sidecar);
    OwnedString csv, info;
    check(fmpp_local_k_csv(pattern.ptr, lk_opts.config_json().c_str(), &csv.ptr,
                           lk_json.empty() ? nullptr : &info.ptr));
    write_file(lk_out, csv.str());
    if (!lk_json.empty()) write_file(lk_json, info.str());
    return kExitOk;
  }

  if (gtest->parsed()) {
    OwnedPattern pattern = load_pattern(gt_csv, gt_sidecar);
    OwnedString result, envelope;
    check(fmpp_global_test(pattern.ptr, gt_opts.config_json().c_str(), &result.ptr,
                           &envelope.ptr));
    write_file(gt_json, result.str());
    if (!gt_env.empty()) write_file(gt_env, envelope.str());
    json summary = json::parse(result.str());
    std::cout << "p_value: " << summary["p_value"].dump()
              << " rejected: " << summary["rejected"].dump() << "\n";
    return kExitOk;
  }

  if (ltest->parsed()) {
    OwnedPattern pattern = load_pattern(lt_csv, lt_sidecar);
    OwnedString report, csv, envelopes;
    check(fmpp_local_test(pattern.ptr, lt_opts.config_json().c_str(), &report.ptr,
                          &csv.ptr, lt_env.empty() ? nullptr : &envelopes.ptr));
    write_file(lt_json, report.str());
    if (!lt_out_csv.empty()) write_file(lt_out_csv, csv.str());
    if (!lt_env.empty()) write_file(lt_env, envelopes.str());
    json summary = json::parse(report.str());
    std::cout << "rejections: " << summary["rejections"].dump() << " of "
              << summary["points"].size() << "\n";
    return kExitOk;
  }

  if (exp->parsed()) {
    std::string spec_text = read_file(exp_spec_path);
    if (exp_seed_opt->count() > 0) {
      json spec = json::parse(spec_text);
      spec["seed"] = exp_seed;
      spec_text = spec.dump();
    }
    OwnedString report, csv;
    check(fmpp_run_experiment(spec_text.c_str(), exp_outdir.c_str(), exp_threads,
                              &report.ptr, &csv.ptr));
    write_file(exp_outdir + "/report.json", report.str());
    write_file(exp_outdir + "/report.csv", csv.str());
    json summary = json::parse(report.str());
    std::cout << "tpr: " << summary["tpr"].dump() << " fpr: " << summary["fpr"].dump()
              << " acc: " << summary["acc"].dump() << "\n";
    return kExitOk;
  }

  if (ingest->parsed()) {
    OwnedPattern pattern;
    OwnedString covariates;
    check(fmpp_ingest_catalog(ing_events.c_str(), ing_waves.c_str(), ing_sidecar.c_str(),
                              ing_resample, &pattern.ptr, &covariates.ptr));
    check(fmpp_pattern_write_ex(pattern.ptr, (ing_prefix + ".csv").c_str(),
                                (ing_prefix + ".json").c_str(), covariates.ptr));
    std::cout << "points: " << fmpp_pattern_size(pattern.ptr) << "\n";
    return kExitOk;
  }
  } catch (const json::exception& e) {
    die(FMPP_E_INVALID, e.what());
  } catch (const std::exception& e) {
    die(FMPP_E_INTERNAL, e.what());
  }

  return kExitInvalid;
}
