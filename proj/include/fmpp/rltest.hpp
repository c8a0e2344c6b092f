#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fmpp/envelope.hpp"
#include "fmpp/summaries.hpp"

namespace fmpp {

enum class Resampling { WithReplacement, WithoutReplacement };
enum class IntensityModel { Kernel, Constant };

// Bandwidth: CvL selection over the default grid, or a fixed value.
struct BandwidthChoice {
  bool cvl = true;
  double fixed = 0.0;

  static BandwidthChoice cvl_selected() { return {true, 0.0}; }
  static BandwidthChoice fixed_value(double h) { return {false, h}; }
};

struct LocalTestConfig {
  int q = 39;
  double alpha = 0.1;
  Resampling resampling = Resampling::WithReplacement;
  TestFunctionSpec testfun{TestFunctionKind::Lp, 2.0};
  IntensityModel intensity = IntensityModel::Kernel;
  BandwidthChoice bandwidth = BandwidthChoice::cvl_selected();
  EdgeCorrection edge = EdgeCorrection::Isotropic;
  int n = 2;
  std::optional<double> r_max;
  bool holm_bonferroni = false;
  bool one_sided = false;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<MarkSetConfig> mark_sets;
  bool keep_envelopes = false;  // retain per-point envelope bundles for export

  void check() const;
};

struct PointTestResult {
  int index = 0;
  double x = 0.0;
  double y = 0.0;
  double p_value = 1.0;
  bool rejected = false;
};

struct LocalTestReport {
  std::vector<PointTestResult> points;
  int rejection_count = 0;
  double rejection_fraction = 0.0;
  double bandwidth_used = 0.0;  // 0 when the intensity is constant
  std::string config_json;     // echo of the configuration actually used
  double elapsed_seconds = 0.0;
  // Populated when keep_envelopes is set: one bundle + bounds per point.
  std::vector<CurveBundle> envelopes;
  std::vector<EnvelopeResult> envelope_results;
  std::vector<double> r_grid;

  std::string to_json(bool include_timings = false) const;
  std::string to_csv() const;                 // index,x,y,p_value,rejected
  std::string envelopes_to_csv() const;       // point_index,r,observed,lower,upper
};

struct GlobalTestResult {
  EnvelopeResult envelope;
  CurveBundle bundle;  // observed + simulated global curves
  double bandwidth_used = 0.0;
  std::string config_json;
  double elapsed_seconds = 0.0;

  std::string to_json(bool include_timings = false) const;
  std::string envelope_csv() const;
};

// Marks replaced by a uniform draw (with replacement) or a uniform random
// permutation (without replacement) of the pattern's own marks; ground
// points never change.
MarkedPointPattern resample_marks(const MarkedPointPattern& pattern,
                                  std::mt19937_64& rng, Resampling mode);

// Per-point Monte Carlo test of random labelling: Q mark resamples shared by
// all points, local curves per (point, resample), one envelope test per
// point. Deterministic for fixed (pattern, config) regardless of threads.
LocalTestReport local_random_labelling_test(const MarkedPointPattern& pattern,
                                            const LocalTestConfig& config);

// Same resampling scheme with global curves and a single envelope test.
GlobalTestResult global_random_labelling_test(const MarkedPointPattern& pattern,
                                              const LocalTestConfig& config);

// Holm step-down decisions for the given p-values at family level alpha.
std::vector<bool> holm_rejections(const std::vector<double>& p_values, double alpha);

}  // namespace fmpp
