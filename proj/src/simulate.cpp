#include "fmpp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fmpp/errors.hpp"
#include "fmpp/rng.hpp"

using nlohmann::json;

namespace fmpp {

// ============================================================
// Ground processes
// ============================================================

std::vector<GroundPoint> sim_homogeneous_poisson(const Window& window, double lambda,
                                                 std::mt19937_64& rng) {
  require(lambda > 0.0, "lambda must be positive");
  std::poisson_distribution<int> count_dist(lambda * window.area());
  int n = count_dist(rng);
  std::uniform_real_distribution<double> ux(window.x_min, window.x_max);
  std::uniform_real_distribution<double> uy(window.y_min, window.y_max);
  std::vector<GroundPoint> points;
  points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) points.push_back({ux(rng), uy(rng)});
  return points;
}

std::vector<GroundPoint> sim_inhomogeneous_poisson(
    const Window& window, const std::function<double(double, double)>& rho,
    double rho_max, std::mt19937_64& rng) {
  require(rho_max > 0.0, "rho_max must be positive");
  std::vector<GroundPoint> proposal = sim_homogeneous_poisson(window, rho_max, rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<GroundPoint> points;
  for (const auto& p : proposal) {
    double r = rho(p.x, p.y);
    if (r > rho_max)
      throw_invalid("rho-exceeds-bound: rho(" + std::to_string(p.x) + ", " +
                    std::to_string(p.y) + ") = " + std::to_string(r) + " > rho_max");
    if (u01(rng) * rho_max < r) points.push_back(p);
  }
  return points;
}

namespace {

// Nudges exact coordinate duplicates apart; simulated patterns must stay
// simple even for degenerate parameters (e.g. Thomas with sigma -> 0).
void jitter_duplicates(std::vector<GroundPoint>& points, const Window& window,
                       std::mt19937_64& rng) {
  double eps = 1e-9 * window.min_side();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::set<std::pair<double, double>> seen;
  for (auto& p : points) {
    while (!seen.insert({p.x, p.y}).second) {
      p.x = std::min(window.x_max, std::max(window.x_min, p.x + eps * u(rng)));
      p.y = std::min(window.y_max, std::max(window.y_min, p.y + eps * u(rng)));
    }
  }
}

}  // namespace

std::vector<GroundPoint> sim_thomas(const Window& window, double parent_intensity,
                                    double sigma, double mean_offspring,
                                    std::mt19937_64& rng) {
  require(parent_intensity > 0.0 && sigma >= 0.0 && mean_offspring > 0.0,
          "Thomas parameters must be positive");
  Window dilated(window.x_min - 4.0 * sigma, window.x_max + 4.0 * sigma,
                 window.y_min - 4.0 * sigma, window.y_max + 4.0 * sigma);
  std::vector<GroundPoint> parents = sim_homogeneous_poisson(dilated, parent_intensity, rng);
  std::poisson_distribution<int> offspring_dist(mean_offspring);
  std::normal_distribution<double> displacement(0.0, sigma > 0.0 ? sigma : 0.0);
  std::vector<GroundPoint> points;
  for (const auto& parent : parents) {
    int kids = offspring_dist(rng);
    for (int c = 0; c < kids; ++c) {
      double dx = sigma > 0.0 ? displacement(rng) : 0.0;
      double dy = sigma > 0.0 ? displacement(rng) : 0.0;
      GroundPoint child{parent.x + dx, parent.y + dy};
      if (window.contains(child.x, child.y)) points.push_back(child);
    }
  }
  jitter_duplicates(points, window, rng);
  return points;
}

// ============================================================
// Marks
// ============================================================

std::vector<FunctionalMark> sim_nugget_marks(int n_points, const TimeGridPtr& grid,
                                             double mu, double sigma2,
                                             std::mt19937_64& rng) {
  require(sigma2 > 0.0, "nugget variance must be positive");
  std::normal_distribution<double> noise(mu, std::sqrt(sigma2));
  std::vector<FunctionalMark> marks;
  marks.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    std::vector<double> values(grid->size());
    for (double& v : values) v = noise(rng);
    marks.emplace_back(grid, std::move(values));
  }
  return marks;
}

double nonseparable_covariance(double h, double u, const NonseparableParams& params) {
  require(params.sigma2 > 0.0, "nonseparable variance scale must be positive");
  double psi = std::pow(std::abs(u), params.psi_alpha);
  double scale = psi + 1.0;
  double hs = h / std::sqrt(scale);
  double phi;
  if (params.phi == "gaussian")
    phi = std::exp(-hs * hs);
  else if (params.phi == "exponential")
    phi = std::exp(-std::abs(hs));
  else
    throw_invalid("unknown phi kind '" + params.phi + "'");
  return std::pow(scale, -params.delta / 2.0) * phi;
}

std::vector<FunctionalMark> sim_nonseparable_marks(
    const std::vector<GroundPoint>& points, const TimeGridPtr& grid, double mu,
    const NonseparableParams& params, int max_joint_dim, std::mt19937_64& rng) {
  const int np = static_cast<int>(points.size());
  const int nt = static_cast<int>(grid->size());
  const long joint = static_cast<long>(np) * nt;
  if (joint > max_joint_dim)
    throw_invalid("dimension-cap-exceeded: " + std::to_string(np) + " points x " +
                  std::to_string(nt) + " times = " + std::to_string(joint) +
                  " joint dimensions > cap " + std::to_string(max_joint_dim));
  if (np == 0) return {};

  // On an equispaced grid the entries depend only on the point pair and the
  // absolute lag index, so the matrix is filled from a (pairs x lags) table;
  // otherwise every entry is computed from its own temporal lag.
  double step = ((*grid)[static_cast<std::size_t>(nt - 1)] - (*grid)[0]) / (nt - 1);
  bool uniform = true;
  for (int l = 1; l < nt && uniform; ++l)
    uniform = std::abs((*grid)[static_cast<std::size_t>(l)] - (*grid)[static_cast<std::size_t>(l - 1)] - step) <=
              1e-9 * std::max(1.0, std::abs(step));

  Eigen::MatrixXd cov(joint, joint);
  for (int i = 0; i < np; ++i)
    for (int j = i; j < np; ++j) {
      double h = distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      if (uniform) {
        std::vector<double> lag_cov(static_cast<std::size_t>(nt));
        for (int l = 0; l < nt; ++l)
          lag_cov[static_cast<std::size_t>(l)] =
              nonseparable_covariance(h, step * l, params);
        for (int a = 0; a < nt; ++a)
          for (int b = 0; b < nt; ++b) {
            double v = lag_cov[static_cast<std::size_t>(std::abs(a - b))];
            cov(static_cast<long>(i) * nt + a, static_cast<long>(j) * nt + b) = v;
            cov(static_cast<long>(j) * nt + b, static_cast<long>(i) * nt + a) = v;
          }
      } else {
        for (int a = 0; a < nt; ++a)
          for (int b = 0; b < nt; ++b) {
            double u = (*grid)[static_cast<std::size_t>(a)] - (*grid)[static_cast<std::size_t>(b)];
            double v = nonseparable_covariance(h, u, params);
            cov(static_cast<long>(i) * nt + a, static_cast<long>(j) * nt + b) = v;
            cov(static_cast<long>(j) * nt + b, static_cast<long>(i) * nt + a) = v;
          }
      }
    }
  cov.diagonal().array() += 1e-8;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw_invalid("not-positive-definite-after-jitter: joint covariance failed Cholesky");

  Eigen::VectorXd z(joint);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (long d = 0; d < joint; ++d) z[d] = standard(rng);
  Eigen::VectorXd field = llt.matrixL() * z;

  const double scale = std::sqrt(params.sigma2);
  std::vector<FunctionalMark> marks;
  marks.reserve(points.size());
  for (int i = 0; i < np; ++i) {
    std::vector<double> values(static_cast<std::size_t>(nt));
    for (int a = 0; a < nt; ++a)
      values[static_cast<std::size_t>(a)] = mu + scale * field[static_cast<long>(i) * nt + a];
    marks.emplace_back(grid, std::move(values));
  }
  return marks;
}

double waveform_variance(double t) {
  double v = 0.2;
  if (t > 0.4) v += 7.5;
  if (t > 0.6) v -= 5.0;
  return v;
}

std::vector<FunctionalMark> sim_waveform_marks(int n_points, const TimeGridPtr& grid,
                                               const std::optional<WaveformTrend>& trend,
                                               std::mt19937_64& rng) {
  require(grid->front() >= 0.0 && grid->back() <= 1.0,
          "waveform marks need a time grid inside [0, 1]");
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<FunctionalMark> marks;
  marks.reserve(static_cast<std::size_t>(n_points));
  std::vector<double> sd(grid->size());
  std::vector<double> mean(grid->size(), 0.0);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    double t = (*grid)[k];
    sd[k] = std::sqrt(waveform_variance(t));
    if (trend)
      mean[k] = trend->offset + trend->amplitude * std::sin(trend->cycles * std::numbers::pi * t);
  }
  for (int i = 0; i < n_points; ++i) {
    std::vector<double> values(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k)
      values[k] = mean[k] + sd[k] * standard(rng);
    marks.emplace_back(grid, std::move(values));
  }
  return marks;
}

// ============================================================
// Models
// ============================================================

std::vector<GroundPoint> GroundModel::sample(const Window& window,
                                             std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::HomogeneousPoisson:
      return sim_homogeneous_poisson(window, lambda, rng);
    case Kind::InhomogeneousPoisson: {
      double a = log_linear[0], bx = log_linear[1], by = log_linear[2];
      auto rho = [a, bx, by](double x, double y) { return std::exp(a + bx * x + by * y); };
      double bound = rho_max.value_or(std::max(
          std::max(rho(window.x_min, window.y_min), rho(window.x_max, window.y_min)),
          std::max(rho(window.x_min, window.y_max), rho(window.x_max, window.y_max))));
      return sim_inhomogeneous_poisson(window, rho, bound, rng);
    }
    case Kind::Thomas:
      return sim_thomas(window, thomas_kappa, thomas_sigma, thomas_mu, rng);
  }
  throw_internal("unreachable ground model kind");
}

double GroundModel::expected_count(const Window& window) const {
  switch (kind) {
    case Kind::HomogeneousPoisson:
      return lambda * window.area();
    case Kind::InhomogeneousPoisson: {
      // exp(a + bx*x + by*y) integrates in closed form over a rectangle.
      double a = log_linear[0], bx = log_linear[1], by = log_linear[2];
      auto span = [](double lo, double hi, double c) {
        if (c == 0.0) return hi - lo;
        return (std::exp(c * hi) - std::exp(c * lo)) / c;
      };
      return std::exp(a) * span(window.x_min, window.x_max, bx) *
             span(window.y_min, window.y_max, by);
    }
    case Kind::Thomas:
      return thomas_kappa * thomas_mu * window.area();
  }
  throw_internal("unreachable ground model kind");
}

std::vector<FunctionalMark> MarkingModel::sample(const std::vector<GroundPoint>& points,
                                                 const TimeGridPtr& grid,
                                                 int max_joint_dim,
                                                 std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::Nugget:
      return sim_nugget_marks(static_cast<int>(points.size()), grid, mu, sigma2, rng);
    case Kind::Nonseparable:
      return sim_nonseparable_marks(points, grid, mu, nonsep, max_joint_dim, rng);
    case Kind::Waveform:
      return sim_waveform_marks(static_cast<int>(points.size()), grid, trend, rng);
  }
  throw_internal("unreachable marking model kind");
}

// ============================================================
// Scenario JSON
// ============================================================

namespace {

GroundModel parse_ground(const json& spec) {
  GroundModel model;
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "homogeneous_poisson") {
    model.kind = GroundModel::Kind::HomogeneousPoisson;
    model.lambda = spec.at("lambda").get<double>();
  } else if (kind == "inhomogeneous_poisson") {
    model.kind = GroundModel::Kind::InhomogeneousPoisson;
    model.log_linear = spec.at("log_linear").get<std::vector<double>>();
    require(model.log_linear.size() == 3, "log_linear needs [a, bx, by]");
    if (spec.contains("rho_max")) model.rho_max = spec["rho_max"].get<double>();
  } else if (kind == "thomas") {
    model.kind = GroundModel::Kind::Thomas;
    model.thomas_kappa = spec.at("kappa").get<double>();
    model.thomas_sigma = spec.at("sigma").get<double>();
    model.thomas_mu = spec.at("mu").get<double>();
  } else {
    throw_invalid("unknown ground model kind '" + kind + "'");
  }
  return model;
}

json ground_json(const GroundModel& model) {
  switch (model.kind) {
    case GroundModel::Kind::HomogeneousPoisson:
      return {{"kind", "homogeneous_poisson"}, {"lambda", model.lambda}};
    case GroundModel::Kind::InhomogeneousPoisson: {
      json out{{"kind", "inhomogeneous_poisson"}, {"log_linear", model.log_linear}};
      if (model.rho_max) out["rho_max"] = *model.rho_max;
      return out;
    }
    case GroundModel::Kind::Thomas:
      return {{"kind", "thomas"},
              {"kappa", model.thomas_kappa},
              {"sigma", model.thomas_sigma},
              {"mu", model.thomas_mu}};
  }
  throw_internal("unreachable ground model kind");
}

MarkingModel parse_marking(const json& spec) {
  MarkingModel model;
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "nugget") {
    model.kind = MarkingModel::Kind::Nugget;
    if (spec.contains("mu")) model.mu = spec["mu"].get<double>();
    if (spec.contains("sigma2")) model.sigma2 = spec["sigma2"].get<double>();
  } else if (kind == "shifted") {  // nugget preset with raised mean
    model.kind = MarkingModel::Kind::Nugget;
    model.mu = spec.contains("mu") ? spec["mu"].get<double>() : 5.5;
    model.sigma2 = spec.contains("sigma2") ? spec["sigma2"].get<double>() : 0.01;
  } else if (kind == "low_variance") {  // nugget preset with shrunk variance
    model.kind = MarkingModel::Kind::Nugget;
    model.mu = spec.contains("mu") ? spec["mu"].get<double>() : 5.0;
    model.sigma2 = spec.contains("sigma2") ? spec["sigma2"].get<double>() : 0.001;
  } else if (kind == "nonseparable") {
    model.kind = MarkingModel::Kind::Nonseparable;
    if (spec.contains("mu")) model.mu = spec["mu"].get<double>();
    if (spec.contains("delta")) model.nonsep.delta = spec["delta"].get<double>();
    if (spec.contains("psi_alpha")) model.nonsep.psi_alpha = spec["psi_alpha"].get<double>();
    if (spec.contains("phi")) model.nonsep.phi = spec["phi"].get<std::string>();
    if (spec.contains("sigma2")) model.nonsep.sigma2 = spec["sigma2"].get<double>();
  } else if (kind == "waveform") {
    model.kind = MarkingModel::Kind::Waveform;
    if (spec.contains("trend") && !spec["trend"].is_null()) {
      WaveformTrend trend;
      const auto& t = spec["trend"];
      trend.offset = t.value("offset", 0.0);
      trend.amplitude = t.value("amplitude", 0.0);
      trend.cycles = t.value("cycles", 0.0);
      model.trend = trend;
    }
  } else {
    throw_invalid("unknown marking model kind '" + kind + "'");
  }
  return model;
}

json marking_json(const MarkingModel& model) {
  switch (model.kind) {
    case MarkingModel::Kind::Nugget:
      return {{"kind", "nugget"}, {"mu", model.mu}, {"sigma2", model.sigma2}};
    case MarkingModel::Kind::Nonseparable:
      return {{"kind", "nonseparable"},
              {"mu", model.mu},
              {"delta", model.nonsep.delta},
              {"psi_alpha", model.nonsep.psi_alpha},
              {"phi", model.nonsep.phi},
              {"sigma2", model.nonsep.sigma2}};
    case MarkingModel::Kind::Waveform: {
      json out{{"kind", "waveform"}};
      if (model.trend)
        out["trend"] = {{"offset", model.trend->offset},
                        {"amplitude", model.trend->amplitude},
                        {"cycles", model.trend->cycles}};
      return out;
    }
  }
  throw_internal("unreachable marking model kind");
}

Window parse_window(const json& spec) {
  return Window(spec.at("x_min").get<double>(), spec.at("x_max").get<double>(),
                spec.at("y_min").get<double>(), spec.at("y_max").get<double>());
}

json window_json(const Window& w) {
  return {{"x_min", w.x_min}, {"x_max", w.x_max}, {"y_min", w.y_min}, {"y_max", w.y_max}};
}

}  // namespace

ScenarioSpec ScenarioSpec::parse(const std::string& json_text) {
  json in;
  try {
    in = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("bad scenario JSON: ") + e.what());
  }

  ScenarioSpec spec;
  if (in.contains("window")) spec.window = parse_window(in["window"]);
  spec.base.ground = parse_ground(in.at("base").at("ground"));
  spec.base.marks = parse_marking(in.at("base").at("marks"));
  if (in.contains("feature") && !in["feature"].is_null()) {
    ScenarioComponent feature;
    feature.ground = parse_ground(in["feature"].at("ground"));
    feature.marks = parse_marking(in["feature"].at("marks"));
    spec.feature = feature;
    if (in["feature"].contains("window"))
      spec.feature_window = parse_window(in["feature"]["window"]);
  }
  // Default time domain: [0,1] for waveform marks, [0,10] otherwise.
  if (spec.base.marks.kind == MarkingModel::Kind::Waveform) {
    spec.time_a = 0.0;
    spec.time_b = 1.0;
  }
  if (in.contains("time")) {
    const auto& t = in["time"];
    spec.time_a = t.value("a", spec.time_a);
    spec.time_b = t.value("b", spec.time_b);
    spec.time_samples = t.value("n", spec.time_samples);
  }
  if (in.contains("joint_dim_cap")) spec.joint_dim_cap = in["joint_dim_cap"].get<int>();
  if (in.contains("seed")) spec.seed = in["seed"].get<std::uint64_t>();

  require(!spec.feature || spec.window.contains(spec.feature_window),
          "feature window must lie inside the scenario window");
  require(spec.time_samples >= 2, "time grid needs at least 2 samples");
  require(spec.time_a < spec.time_b, "time domain needs a < b");
  return spec;
}

std::string ScenarioSpec::to_json() const {
  json out;
  out["window"] = window_json(window);
  out["base"] = {{"ground", ground_json(base.ground)}, {"marks", marking_json(base.marks)}};
  if (feature)
    out["feature"] = {{"window", window_json(feature_window)},
                      {"ground", ground_json(feature->ground)},
                      {"marks", marking_json(feature->marks)}};
  out["time"] = {{"a", time_a}, {"b", time_b}, {"n", time_samples}};
  out["joint_dim_cap"] = joint_dim_cap;
  out["seed"] = seed;
  return out.dump(2) + "\n";
}

std::string SimulatedPattern::labels_csv() const {
  std::ostringstream out;
  out << "index,origin\n";
  for (std::size_t i = 0; i < origins.size(); ++i)
    out << i << "," << (origins[i] == PointOrigin::Base ? "base" : "feature") << "\n";
  return out.str();
}

SimulatedPattern sim_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  TimeGridPtr grid = make_time_grid(spec.time_a, spec.time_b, spec.time_samples);

  auto ground_rng = substream(seed, rng_domain::kSimulate, 0);
  std::vector<GroundPoint> base_points = spec.base.ground.sample(spec.window, ground_rng);
  auto mark_rng = substream(seed, rng_domain::kSimulate, 1);
  std::vector<FunctionalMark> base_marks =
      spec.base.marks.sample(base_points, grid, spec.joint_dim_cap, mark_rng);

  std::vector<GroundPoint> points = base_points;
  std::vector<FunctionalMark> marks = std::move(base_marks);
  std::vector<PointOrigin> origins(points.size(), PointOrigin::Base);

  if (spec.feature) {
    auto feature_ground_rng = substream(seed, rng_domain::kSimulate, 2);
    std::vector<GroundPoint> feature_points =
        spec.feature->ground.sample(spec.feature_window, feature_ground_rng);
    auto feature_mark_rng = substream(seed, rng_domain::kSimulate, 3);
    std::vector<FunctionalMark> feature_marks =
        spec.feature->marks.sample(feature_points, grid, spec.joint_dim_cap, feature_mark_rng);
    points.insert(points.end(), feature_points.begin(), feature_points.end());
    for (auto& m : feature_marks) marks.push_back(std::move(m));
    origins.resize(points.size(), PointOrigin::Feature);
  }

  auto jitter_rng = substream(seed, rng_domain::kSimulate, 4);
  jitter_duplicates(points, spec.window, jitter_rng);

  SimulatedPattern result{MarkedPointPattern(spec.window, std::move(points), std::move(marks)),
                          std::move(origins)};
  require_valid(result.pattern);
  return result;
}

}  // namespace fmpp
