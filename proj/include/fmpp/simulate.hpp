#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fmpp/pattern.hpp"

namespace fmpp {

// ============================================================
// Ground process generators
// ============================================================

std::vector<GroundPoint> sim_homogeneous_poisson(const Window& window, double lambda,
                                                 std::mt19937_64& rng);

// Thinning of a homogeneous Poisson(rho_max) proposal; errors when rho
// exceeds rho_max at a sampled location.
std::vector<GroundPoint> sim_inhomogeneous_poisson(
    const Window& window, const std::function<double(double, double)>& rho,
    double rho_max, std::mt19937_64& rng);

// Poisson cluster process: parents on the window dilated by 4*sigma, Poisson
// offspring counts, isotropic Gaussian displacements, children clipped to the
// window. Exact duplicates are jittered to keep the pattern simple.
std::vector<GroundPoint> sim_thomas(const Window& window, double parent_intensity,
                                    double sigma, double mean_offspring,
                                    std::mt19937_64& rng);

// ============================================================
// Mark generators
// ============================================================

// iid Gaussian noise per (point, time): the pure nugget field.
std::vector<FunctionalMark> sim_nugget_marks(int n_points, const TimeGridPtr& grid,
                                             double mu, double sigma2,
                                             std::mt19937_64& rng);

struct NonseparableParams {
  double delta = 2.0;        // temporal decay exponent
  double psi_alpha = 1.0;    // psi(u) = |u|^alpha
  std::string phi = "gaussian";  // "gaussian" exp(-h^2) or "exponential" exp(-|h|)
  double sigma2 = 1.0;       // marginal variance scale: field = mu + sigma * xi
};

// Space-time covariance C(h, u) = (psi(u)+1)^(-delta/2) * phi(h / sqrt(psi(u)+1)).
double nonseparable_covariance(double h, double u, const NonseparableParams& params);

// One joint Gaussian draw over all (point, time) pairs with mean mu; dense
// Cholesky with 1e-8 diagonal jitter. points.size() * grid size must not
// exceed max_joint_dim.
std::vector<FunctionalMark> sim_nonseparable_marks(
    const std::vector<GroundPoint>& points, const TimeGridPtr& grid, double mu,
    const NonseparableParams& params, int max_joint_dim, std::mt19937_64& rng);

inline constexpr int kDefaultJointDimCap = 6000;

struct WaveformTrend {
  double offset = 0.0;
  double amplitude = 0.0;
  double cycles = 0.0;  // mean(t) = offset + amplitude * sin(cycles * pi * t)
};

// Independent Gaussian per (point, time) with the variance-break profile
// sigma^2(t) = 0.2 + 7.5*1{t > 0.4} - 5*1{t > 0.6}; optional sinusoid trend.
std::vector<FunctionalMark> sim_waveform_marks(int n_points, const TimeGridPtr& grid,
                                               const std::optional<WaveformTrend>& trend,
                                               std::mt19937_64& rng);

double waveform_variance(double t);

// ============================================================
// Scenarios
// ============================================================

struct GroundModel {
  enum class Kind { HomogeneousPoisson, InhomogeneousPoisson, Thomas };
  Kind kind = Kind::HomogeneousPoisson;
  double lambda = 200.0;                     // homogeneous
  std::vector<double> log_linear{0.0, 0.0, 0.0};  // rho = exp(a + b*x + c*y)
  std::optional<double> rho_max;             // default: max over window corners
  double thomas_kappa = 25.0;
  double thomas_sigma = 0.05;
  double thomas_mu = 7.0;

  std::vector<GroundPoint> sample(const Window& window, std::mt19937_64& rng) const;
  double expected_count(const Window& window) const;
};

struct MarkingModel {
  enum class Kind { Nugget, Nonseparable, Waveform };
  Kind kind = Kind::Nugget;
  double mu = 5.0;
  double sigma2 = 0.01;
  NonseparableParams nonsep;
  std::optional<WaveformTrend> trend;

  std::vector<FunctionalMark> sample(const std::vector<GroundPoint>& points,
                                     const TimeGridPtr& grid, int max_joint_dim,
                                     std::mt19937_64& rng) const;
};

struct ScenarioComponent {
  GroundModel ground;
  MarkingModel marks;
};

struct ScenarioSpec {
  Window window;
  ScenarioComponent base;
  std::optional<ScenarioComponent> feature;
  Window feature_window{0.0, 0.5, 0.0, 0.5};
  double time_a = 0.0, time_b = 10.0;
  int time_samples = 100;
  int joint_dim_cap = kDefaultJointDimCap;
  std::uint64_t seed = 0;

  static ScenarioSpec parse(const std::string& json_text);
  std::string to_json() const;
};

enum class PointOrigin { Base, Feature };

struct SimulatedPattern {
  MarkedPointPattern pattern;
  std::vector<PointOrigin> origins;

  std::string labels_csv() const;  // index,origin
};

// Base pattern on the full window plus an optional superimposed feature
// pattern on the feature window, marks drawn from the respective models on a
// shared time grid. Simplicity enforced by jittering exact duplicates.
SimulatedPattern sim_scenario(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace fmpp
