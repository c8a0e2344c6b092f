#include "fmpp/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fmpp/config.hpp"
#include "fmpp/errors.hpp"
#include "fmpp/parallel.hpp"
#include "fmpp/pattern_io.hpp"
#include "fmpp/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace fmpp {

ExperimentSpec ExperimentSpec::parse(const std::string& json_text) {
  json in;
  try {
    in = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("bad experiment JSON: ") + e.what());
  }
  ExperimentSpec spec;
  spec.scenario = ScenarioSpec::parse(in.at("scenario").dump());
  if (in.contains("replicates")) spec.replicates = in["replicates"].get<int>();
  require(spec.replicates >= 1, "replicates must be >= 1");
  spec.test = parse_local_test_config(in.contains("test") ? in["test"].dump() : "{}");
  if (in.contains("seed")) spec.seed = in["seed"].get<std::uint64_t>();
  return spec;
}

std::string ExperimentSpec::to_json() const {
  json out;
  out["scenario"] = json::parse(scenario.to_json());
  out["replicates"] = replicates;
  out["test"] = json::parse(local_test_config_json(test));
  out["seed"] = seed;
  return out.dump(2) + "\n";
}

ReplicateScore score_replicate(const LocalTestReport& report,
                               const std::vector<PointOrigin>& origins, int replicate) {
  require(report.points.size() == origins.size(),
          "label count does not match report length");
  ReplicateScore score;
  score.replicate = replicate;
  for (std::size_t j = 0; j < origins.size(); ++j) {
    bool positive = origins[j] == PointOrigin::Feature;
    bool predicted = report.points[j].rejected;
    if (positive && predicted) ++score.tp;
    else if (positive && !predicted) ++score.fn;
    else if (!positive && predicted) ++score.fp;
    else ++score.tn;
  }
  int positives = score.tp + score.fn;
  int negatives = score.fp + score.tn;
  if (positives > 0) score.tpr = static_cast<double>(score.tp) / positives;
  if (negatives > 0) score.fpr = static_cast<double>(score.fp) / negatives;
  score.acc = static_cast<double>(score.tp + score.tn) /
              static_cast<double>(positives + negatives);
  return score;
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

json score_to_json(const ReplicateScore& s, std::uint64_t spec_hash) {
  json out;
  out["replicate"] = s.replicate;
  out["spec_hash"] = spec_hash;
  out["tp"] = s.tp;
  out["fp"] = s.fp;
  out["tn"] = s.tn;
  out["fn"] = s.fn;
  if (s.tpr) out["tpr"] = *s.tpr; else out["tpr"] = nullptr;
  if (s.fpr) out["fpr"] = *s.fpr; else out["fpr"] = nullptr;
  out["acc"] = s.acc;
  return out;
}

ReplicateScore score_from_json(const json& in) {
  ReplicateScore s;
  s.replicate = in.at("replicate").get<int>();
  s.tp = in.at("tp").get<int>();
  s.fp = in.at("fp").get<int>();
  s.tn = in.at("tn").get<int>();
  s.fn = in.at("fn").get<int>();
  if (!in.at("tpr").is_null()) s.tpr = in["tpr"].get<double>();
  if (!in.at("fpr").is_null()) s.fpr = in["fpr"].get<double>();
  s.acc = in.at("acc").get<double>();
  return s;
}

std::string replicate_path(const std::string& dir, int index) {
  char name[48];
  std::snprintf(name, sizeof(name), "replicate_%04d.json", index);
  return (fs::path(dir) / name).string();
}

}  // namespace

ClassificationReport run_experiment(const ExperimentSpec& spec,
                                    const std::string& output_dir, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  require(spec.replicates >= 1, "replicates must be >= 1");
  spec.test.check();

  std::string spec_echo = spec.to_json();
  std::uint64_t spec_hash = fnv1a(spec_echo);
  if (!output_dir.empty()) fs::create_directories(output_dir);

  std::vector<ReplicateScore> scores(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, threads, [&](int r) {
    if (!output_dir.empty()) {
      std::string path = replicate_path(output_dir, r);
      if (fs::exists(path)) {
        json cached = json::parse(read_text_file(path));
        if (cached.value("spec_hash", 0ULL) == spec_hash) {
          scores[static_cast<std::size_t>(r)] = score_from_json(cached);
          return;
        }
      }
    }
    std::uint64_t rep_seed = spec.seed ^ static_cast<std::uint64_t>(r);
    SimulatedPattern sim = sim_scenario(spec.scenario, rep_seed);
    LocalTestConfig test = spec.test;
    test.seed = rep_seed;
    test.threads = 1;  // parallelism lives at the replicate level here
    LocalTestReport report = local_random_labelling_test(sim.pattern, test);
    scores[static_cast<std::size_t>(r)] = score_replicate(report, sim.origins, r);
    if (!output_dir.empty())
      write_text_file(replicate_path(output_dir, r),
                      score_to_json(scores[static_cast<std::size_t>(r)], spec_hash).dump(2) + "\n");
  });

  ClassificationReport report;
  report.replicates = std::move(scores);
  report.spec_json = spec_echo;
  double tpr_sum = 0.0, fpr_sum = 0.0, acc_sum = 0.0;
  int tpr_n = 0, fpr_n = 0;
  for (const auto& s : report.replicates) {
    report.total_tp += s.tp;
    report.total_fp += s.fp;
    report.total_tn += s.tn;
    report.total_fn += s.fn;
    if (s.tpr) { tpr_sum += *s.tpr; ++tpr_n; }
    if (s.fpr) { fpr_sum += *s.fpr; ++fpr_n; }
    acc_sum += s.acc;
  }
  if (tpr_n > 0) report.mean_tpr = tpr_sum / tpr_n;
  if (fpr_n > 0) report.mean_fpr = fpr_sum / fpr_n;
  report.mean_acc = acc_sum / static_cast<double>(report.replicates.size());
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string ClassificationReport::to_json(bool include_timings) const {
  json out;
  out["type"] = "experiment_report";
  out["version"] = kVersion;
  out["spec"] = json::parse(spec_json);
  if (mean_tpr) out["tpr"] = *mean_tpr; else out["tpr"] = nullptr;
  if (mean_fpr) out["fpr"] = *mean_fpr; else out["fpr"] = nullptr;
  out["acc"] = mean_acc;
  out["confusion_totals"] = {{"tp", total_tp}, {"fp", total_fp}, {"tn", total_tn}, {"fn", total_fn}};
  json rows = json::array();
  for (const auto& s : replicates) rows.push_back(score_to_json(s, 0));
  for (auto& row : rows) row.erase("spec_hash");
  out["replicates"] = rows;
  if (include_timings) out["timings"] = {{"total_seconds", elapsed_seconds}};
  return out.dump(2) + "\n";
}

std::string ClassificationReport::to_csv() const {
  std::ostringstream out;
  out << "replicate,tp,fp,tn,fn,tpr,fpr,acc\n";
  for (const auto& s : replicates) {
    out << s.replicate << "," << s.tp << "," << s.fp << "," << s.tn << "," << s.fn << ",";
    out << (s.tpr ? format_double(*s.tpr) : "NA") << ",";
    out << (s.fpr ? format_double(*s.fpr) : "NA") << ",";
    out << format_double(s.acc) << "\n";
  }
  return out.str();
}

}  // namespace fmpp
