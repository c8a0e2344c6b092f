#pragma once

#include <span>
#include <vector>

#include "fmpp/pattern.hpp"

namespace fmpp {

// Evaluation floor keeping denominators strictly positive.
inline constexpr double kIntensityFloor = 1e-10;

enum class KernelEdgeCorrection { Global, None };

// Evaluable ground-intensity field: either constant N/|W| or a Gaussian
// kernel estimate with global edge correction (the kernel sum divided by the
// kernel mass the window retains at the evaluation location). Immutable and
// safe to evaluate concurrently.
class IntensityEstimate {
 public:
  enum class Kind { Constant, Kernel };

  static IntensityEstimate constant(const MarkedPointPattern& pattern);
  static IntensityEstimate kernel(const MarkedPointPattern& pattern, double bandwidth,
                                  KernelEdgeCorrection edge = KernelEdgeCorrection::Global);

  double value_at(double x, double y) const;
  double value_at(const GroundPoint& p) const { return value_at(p.x, p.y); }

  Kind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }  // 0 for constant
  KernelEdgeCorrection edge_correction() const { return edge_; }

  // Kernel mass retained inside the window around (x, y); 1 for constant.
  double window_mass(double x, double y) const;

 private:
  IntensityEstimate() = default;
  Kind kind_ = Kind::Constant;
  double constant_value_ = 0.0;
  double bandwidth_ = 0.0;
  KernelEdgeCorrection edge_ = KernelEdgeCorrection::Global;
  Window window_;
  std::vector<GroundPoint> points_;
};

// Cronie-van Lieshout objective: squared discrepancy between |W| and the sum
// of reciprocal kernel intensity estimates at the data points.
double cvl_objective(const MarkedPointPattern& pattern, double bandwidth);

// argmin of the objective over the grid; ties break toward the smallest h.
double cvl_select_bandwidth(const MarkedPointPattern& pattern,
                            std::span<const double> h_grid);

// 32 log-spaced bandwidths between 0.01 and 0.5 of the window's short side.
std::vector<double> default_bandwidth_grid(const Window& window);

}  // namespace fmpp
