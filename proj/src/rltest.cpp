#include "fmpp/rltest.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fmpp/config.hpp"
#include "fmpp/errors.hpp"
#include "fmpp/parallel.hpp"
#include "fmpp/pattern_io.hpp"
#include "fmpp/rng.hpp"
#include "fmpp/version.hpp"

using nlohmann::json;

namespace fmpp {

void LocalTestConfig::check() const {
  require(q >= 1, "config-invalid: Q must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "config-invalid: alpha must lie in (0, 1)");
  require(alpha * (q + 1) >= 1.0, "config-invalid: alpha * (Q + 1) must be >= 1");
  require(n == 2 || n == 3, "config-invalid: n must be 2 or 3");
  require(threads >= 1, "config-invalid: threads must be >= 1");
  if (!bandwidth.cvl)
    require(bandwidth.fixed > 0.0, "config-invalid: fixed bandwidth must be positive");
  if (r_max) require(*r_max > 0.0, "config-invalid: r_max must be positive");
}

MarkedPointPattern resample_marks(const MarkedPointPattern& pattern,
                                  std::mt19937_64& rng, Resampling mode) {
  require_valid(pattern);
  const int k = pattern.size();
  std::vector<int> assign(static_cast<std::size_t>(k));
  if (mode == Resampling::WithReplacement) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int j = 0; j < k; ++j) assign[static_cast<std::size_t>(j)] = pick(rng);
  } else {
    std::iota(assign.begin(), assign.end(), 0);
    std::shuffle(assign.begin(), assign.end(), rng);
  }
  std::vector<FunctionalMark> marks;
  marks.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) marks.push_back(pattern.mark(assign[static_cast<std::size_t>(j)]));
  return MarkedPointPattern(pattern.window(), pattern.points(), std::move(marks));
}

std::vector<bool> holm_rejections(const std::vector<double>& p_values, double alpha) {
  const int m = static_cast<int>(p_values.size());
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return p_values[static_cast<std::size_t>(a)] < p_values[static_cast<std::size_t>(b)]; });
  std::vector<bool> reject(static_cast<std::size_t>(m), false);
  for (int i = 0; i < m; ++i) {
    double threshold = alpha / static_cast<double>(m - i);
    if (p_values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] <= threshold)
      reject[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
    else
      break;
  }
  return reject;
}

namespace {

struct PreparedRun {
  IntensityEstimate intensity;
  double bandwidth_used = 0.0;
  std::vector<std::vector<int>> assignments;  // [0] = identity (observed)
};

PreparedRun prepare_run(const MarkedPointPattern& pattern, const LocalTestConfig& config) {
  config.check();
  require_valid(pattern);
  require(pattern.size() >= 2, "degenerate-pattern: need at least 2 points");

  PreparedRun run{IntensityEstimate::constant(pattern), 0.0, {}};
  if (config.intensity == IntensityModel::Kernel) {
    double h = config.bandwidth.cvl
                   ? cvl_select_bandwidth(pattern, default_bandwidth_grid(pattern.window()))
                   : config.bandwidth.fixed;
    run.intensity = IntensityEstimate::kernel(pattern, h);
    run.bandwidth_used = h;
  }

  const int k = pattern.size();
  run.assignments.resize(static_cast<std::size_t>(config.q) + 1);
  run.assignments[0].resize(static_cast<std::size_t>(k));
  std::iota(run.assignments[0].begin(), run.assignments[0].end(), 0);
  for (int q = 1; q <= config.q; ++q) {
    auto rng = substream(config.seed, rng_domain::kResample, static_cast<std::uint64_t>(q));
    auto& assign = run.assignments[static_cast<std::size_t>(q)];
    assign.resize(static_cast<std::size_t>(k));
    if (config.resampling == Resampling::WithReplacement) {
      std::uniform_int_distribution<int> pick(0, k - 1);
      for (int j = 0; j < k; ++j) assign[static_cast<std::size_t>(j)] = pick(rng);
    } else {
      std::iota(assign.begin(), assign.end(), 0);
      std::shuffle(assign.begin(), assign.end(), rng);
    }
  }
  return run;
}

KConfig k_config_of(const LocalTestConfig& config) {
  KConfig kc;
  kc.n = config.n;
  kc.testfun = config.testfun;
  kc.edge = config.edge;
  kc.r_max = config.r_max;
  kc.mark_sets = config.mark_sets;
  return kc;
}

}  // namespace

LocalTestReport local_random_labelling_test(const MarkedPointPattern& pattern,
                                            const LocalTestConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  PreparedRun run = prepare_run(pattern, config);
  KEngine engine(pattern, run.intensity, k_config_of(config));

  const int k = pattern.size();
  const int m = config.q + 1;
  const std::size_t g = engine.r_grid().size();

  // curves[(q * k + j) * g + .] = local curve of point j under assignment q.
  std::vector<double> curves(static_cast<std::size_t>(m) * k * g);
  parallel_for(m, config.threads, [&](int q) {
    const auto& assign = run.assignments[static_cast<std::size_t>(q)];
    auto ctx = engine.context(assign);
    for (int j = 0; j < k; ++j)
      engine.local_values(j, assign, ctx,
                          curves.data() + (static_cast<std::size_t>(q) * k + j) * g);
  });

  std::vector<double> p_values(static_cast<std::size_t>(k));
  std::vector<CurveBundle> bundles;
  std::vector<EnvelopeResult> env_results;
  if (config.keep_envelopes) {
    bundles.resize(static_cast<std::size_t>(k));
    env_results.resize(static_cast<std::size_t>(k));
  }

  parallel_for(k, config.threads, [&](int j) {
    CurveBundle bundle;
    bundle.r = engine.r_grid();
    auto slice = [&](int q) {
      const double* p = curves.data() + (static_cast<std::size_t>(q) * k + j) * g;
      return std::vector<double>(p, p + g);
    };
    bundle.observed = slice(0);
    bundle.simulated.reserve(static_cast<std::size_t>(config.q));
    for (int q = 1; q < m; ++q) bundle.simulated.push_back(slice(q));
    p_values[static_cast<std::size_t>(j)] = erl_p_value(bundle, config.one_sided);
    if (config.keep_envelopes) {
      env_results[static_cast<std::size_t>(j)] =
          envelope_test(bundle, config.alpha, config.one_sided);
      bundles[static_cast<std::size_t>(j)] = std::move(bundle);
    }
  });

  std::vector<bool> rejected(static_cast<std::size_t>(k));
  if (config.holm_bonferroni) {
    rejected = holm_rejections(p_values, config.alpha);
  } else {
    for (int j = 0; j < k; ++j)
      rejected[static_cast<std::size_t>(j)] = p_values[static_cast<std::size_t>(j)] <= config.alpha;
  }

  LocalTestReport report;
  report.points.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    auto& pr = report.points[static_cast<std::size_t>(j)];
    pr.index = j;
    pr.x = pattern.point(j).x;
    pr.y = pattern.point(j).y;
    pr.p_value = p_values[static_cast<std::size_t>(j)];
    pr.rejected = rejected[static_cast<std::size_t>(j)];
    if (pr.rejected) ++report.rejection_count;
  }
  report.rejection_fraction = static_cast<double>(report.rejection_count) / k;
  report.bandwidth_used = run.bandwidth_used;
  report.config_json = local_test_config_json(config);
  report.r_grid = engine.r_grid();
  report.envelopes = std::move(bundles);
  report.envelope_results = std::move(env_results);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

GlobalTestResult global_random_labelling_test(const MarkedPointPattern& pattern,
                                              const LocalTestConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  PreparedRun run = prepare_run(pattern, config);
  KEngine engine(pattern, run.intensity, k_config_of(config));

  const int m = config.q + 1;
  std::vector<std::vector<double>> globals(static_cast<std::size_t>(m));
  parallel_for(m, config.threads, [&](int q) {
    const auto& assign = run.assignments[static_cast<std::size_t>(q)];
    auto ctx = engine.context(assign);
    globals[static_cast<std::size_t>(q)] = engine.global(assign, ctx).values;
  });

  GlobalTestResult result;
  result.bundle.r = engine.r_grid();
  result.bundle.observed = std::move(globals[0]);
  for (int q = 1; q < m; ++q)
    result.bundle.simulated.push_back(std::move(globals[static_cast<std::size_t>(q)]));
  result.envelope = envelope_test(result.bundle, config.alpha, config.one_sided);
  result.bandwidth_used = run.bandwidth_used;
  result.config_json = local_test_config_json(config);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ============================================================
// Serialization
// ============================================================

std::string LocalTestReport::to_json(bool include_timings) const {
  json out;
  out["type"] = "localtest_report";
  out["version"] = kVersion;
  out["config"] = json::parse(config_json);
  out["bandwidth"] = bandwidth_used;
  out["rejections"] = rejection_count;
  out["rejection_fraction"] = rejection_fraction;
  json pts = json::array();
  for (const auto& p : points)
    pts.push_back({{"index", p.index},
                   {"x", p.x},
                   {"y", p.y},
                   {"p_value", p.p_value},
                   {"rejected", p.rejected}});
  out["points"] = pts;
  if (include_timings) out["timings"] = {{"total_seconds", elapsed_seconds}};
  return out.dump(2) + "\n";
}

std::string LocalTestReport::to_csv() const {
  std::ostringstream out;
  out << "index,x,y,p_value,rejected\n";
  for (const auto& p : points)
    out << p.index << "," << format_double(p.x) << "," << format_double(p.y) << ","
        << format_double(p.p_value) << "," << (p.rejected ? 1 : 0) << "\n";
  return out.str();
}

std::string LocalTestReport::envelopes_to_csv() const {
  require(!envelopes.empty(), "report has no stored envelopes (enable keep_envelopes)");
  std::ostringstream out;
  out << "point_index,r,observed,lower,upper\n";
  for (std::size_t j = 0; j < envelopes.size(); ++j) {
    const auto& bundle = envelopes[j];
    const auto& env = envelope_results[j];
    for (std::size_t g = 0; g < bundle.r.size(); ++g)
      out << points[j].index << "," << format_double(bundle.r[g]) << ","
          << format_double(bundle.observed[g]) << "," << format_double(env.lower[g])
          << "," << format_double(env.upper[g]) << "\n";
  }
  return out.str();
}

std::string GlobalTestResult::to_json(bool include_timings) const {
  json out;
  out["type"] = "globaltest_result";
  out["version"] = kVersion;
  out["config"] = json::parse(config_json);
  out["bandwidth"] = bandwidth_used;
  out["measure"] = "erl";
  out["p_value"] = envelope.p_value;
  out["alpha"] = envelope.alpha;
  out["q"] = static_cast<int>(bundle.simulated.size());
  out["rejected"] = envelope.rejected;
  if (include_timings) out["timings"] = {{"total_seconds", elapsed_seconds}};
  return out.dump(2) + "\n";
}

std::string GlobalTestResult::envelope_csv() const {
  return envelope_to_csv(bundle, envelope);
}

}  // namespace fmpp
