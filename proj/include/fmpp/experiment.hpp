#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fmpp/rltest.hpp"
#include "fmpp/simulate.hpp"

namespace fmpp {

// One simulation-study cell: simulate a scenario, run the local test, score
// per-point decisions against the known origin labels (feature = positive).
struct ExperimentSpec {
  ScenarioSpec scenario;
  int replicates = 20;
  LocalTestConfig test;
  std::uint64_t seed = 0;

  static ExperimentSpec parse(const std::string& json_text);
  std::string to_json() const;
};

struct ReplicateScore {
  int replicate = 0;
  int tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> tpr;  // undefined when a replicate has no positives
  std::optional<double> fpr;
  double acc = 0.0;
};

struct ClassificationReport {
  std::vector<ReplicateScore> replicates;
  std::optional<double> mean_tpr;
  std::optional<double> mean_fpr;
  double mean_acc = 0.0;
  int total_tp = 0, total_fp = 0, total_tn = 0, total_fn = 0;
  std::string spec_json;  // echo
  double elapsed_seconds = 0.0;

  std::string to_json(bool include_timings = false) const;
  std::string to_csv() const;  // replicate,tp,fp,tn,fn,tpr,fpr,acc
};

ReplicateScore score_replicate(const LocalTestReport& report,
                               const std::vector<PointOrigin>& origins, int replicate);

// Runs the replicates (each with seed spec.seed ^ index), scoring rejections
// against origin labels. When output_dir is non-empty, one JSON file per
// replicate is written there and existing files with a matching spec hash
// are loaded instead of recomputed, so interrupted runs resume and finished
// runs reproduce the identical aggregate.
ClassificationReport run_experiment(const ExperimentSpec& spec,
                                    const std::string& output_dir = "",
                                    int threads = 1);

}  // namespace fmpp
