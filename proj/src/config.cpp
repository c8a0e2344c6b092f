#include "fmpp/config.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "fmpp/errors.hpp"

using nlohmann::json;

namespace fmpp {

const char* edge_name(EdgeCorrection edge) {
  switch (edge) {
    case EdgeCorrection::None: return "none";
    case EdgeCorrection::Isotropic: return "isotropic";
    case EdgeCorrection::Translation: return "translation";
  }
  return "?";
}

EdgeCorrection parse_edge(const std::string& name) {
  if (name == "isotropic" || name == "iso") return EdgeCorrection::Isotropic;
  if (name == "translation" || name == "trans") return EdgeCorrection::Translation;
  if (name == "none") return EdgeCorrection::None;
  throw_invalid("unknown edge correction '" + name + "'");
}

namespace {

MarkSetPredicate parse_predicate(const json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "all") return MarkSetPredicate::all_marks();
  if (kind == "mean_ge")
    return MarkSetPredicate::mean_ge(spec.at("threshold").get<double>());
  if (kind == "sup_ge")
    return MarkSetPredicate::sup_in_interval_ge(spec.at("t0").get<double>(),
                                                spec.at("t1").get<double>(),
                                                spec.at("threshold").get<double>());
  throw_invalid("unknown mark set predicate kind '" + kind + "'");
}

json predicate_json(const MarkSetPredicate& pred) {
  // The name encodes kind and parameters; good enough for a config echo.
  return json{{"name", pred.name()}};
}

}  // namespace

LocalTestConfig parse_local_test_config(const std::string& json_text) {
  json in;
  try {
    in = json::parse(json_text.empty() ? "{}" : json_text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("bad config JSON: ") + e.what());
  }
  if (!in.is_object()) throw_invalid("config JSON must be an object");

  LocalTestConfig config;
  if (in.contains("q")) config.q = in["q"].get<int>();
  if (in.contains("alpha")) config.alpha = in["alpha"].get<double>();
  if (in.contains("n")) config.n = in["n"].get<int>();
  if (in.contains("seed")) config.seed = in["seed"].get<std::uint64_t>();
  if (in.contains("threads")) config.threads = in["threads"].get<int>();
  if (in.contains("holm_bonferroni")) config.holm_bonferroni = in["holm_bonferroni"].get<bool>();
  if (in.contains("one_sided")) config.one_sided = in["one_sided"].get<bool>();
  if (in.contains("keep_envelopes")) config.keep_envelopes = in["keep_envelopes"].get<bool>();
  if (in.contains("r_max") && !in["r_max"].is_null())
    config.r_max = in["r_max"].get<double>();

  if (in.contains("resampling")) {
    std::string mode = in["resampling"].get<std::string>();
    if (mode == "with_replacement" || mode == "replace")
      config.resampling = Resampling::WithReplacement;
    else if (mode == "without_replacement" || mode == "permute")
      config.resampling = Resampling::WithoutReplacement;
    else
      throw_invalid("unknown resampling mode '" + mode + "'");
  }

  if (in.contains("testfun")) {
    const auto& tf = in["testfun"];
    double p = 2.0;
    if (tf.contains("p")) {
      if (tf["p"].is_string()) {
        std::string ps = tf["p"].get<std::string>();
        require(ps == "inf" || ps == "infinity", "testfun p must be a number or 'inf'");
        p = std::numeric_limits<double>::infinity();
      } else {
        p = tf["p"].get<double>();
      }
    }
    config.testfun = TestFunctionSpec::parse(tf.at("kind").get<std::string>(), p);
  }

  if (in.contains("edge")) config.edge = parse_edge(in["edge"].get<std::string>());

  if (in.contains("intensity")) {
    std::string kind = in["intensity"].get<std::string>();
    if (kind == "kernel")
      config.intensity = IntensityModel::Kernel;
    else if (kind == "constant" || kind == "const")
      config.intensity = IntensityModel::Constant;
    else
      throw_invalid("unknown intensity model '" + kind + "'");
  }

  if (in.contains("bandwidth")) {
    const auto& bw = in["bandwidth"];
    if (bw.is_string()) {
      require(bw.get<std::string>() == "cvl", "bandwidth must be 'cvl' or a number");
      config.bandwidth = BandwidthChoice::cvl_selected();
    } else {
      config.bandwidth = BandwidthChoice::fixed_value(bw.get<double>());
    }
  }

  if (in.contains("mark_sets") && !in["mark_sets"].is_null()) {
    const auto& ms = in["mark_sets"];
    MarkSetConfig sets;
    if (ms.contains("own")) sets.own = parse_predicate(ms["own"]);
    if (ms.contains("others"))
      for (const auto& other : ms["others"]) sets.others.push_back(parse_predicate(other));
    while (static_cast<int>(sets.others.size()) < config.n - 1)
      sets.others.push_back(MarkSetPredicate::all_marks());
    config.mark_sets = std::move(sets);
  }

  return config;
}

std::string local_test_config_json(const LocalTestConfig& config) {
  json out;
  out["q"] = config.q;
  out["alpha"] = config.alpha;
  out["n"] = config.n;
  out["seed"] = config.seed;
  out["holm_bonferroni"] = config.holm_bonferroni;
  out["one_sided"] = config.one_sided;
  out["resampling"] = config.resampling == Resampling::WithReplacement
                          ? "with_replacement"
                          : "without_replacement";
  json tf;
  tf["kind"] = config.testfun.kind_name();
  if (std::isinf(config.testfun.p))
    tf["p"] = "inf";
  else
    tf["p"] = config.testfun.p;
  out["testfun"] = tf;
  out["edge"] = edge_name(config.edge);
  out["intensity"] = config.intensity == IntensityModel::Kernel ? "kernel" : "constant";
  if (config.bandwidth.cvl)
    out["bandwidth"] = "cvl";
  else
    out["bandwidth"] = config.bandwidth.fixed;
  if (config.r_max)
    out["r_max"] = *config.r_max;
  else
    out["r_max"] = nullptr;
  if (config.mark_sets) {
    json ms;
    ms["own"] = predicate_json(config.mark_sets->own);
    json others = json::array();
    for (const auto& other : config.mark_sets->others) others.push_back(predicate_json(other));
    ms["others"] = others;
    out["mark_sets"] = ms;
  }
  return out.dump();
}

}  // namespace fmpp
