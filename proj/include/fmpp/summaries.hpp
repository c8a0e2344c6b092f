#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fmpp/intensity.hpp"
#include "fmpp/neighbors.hpp"
#include "fmpp/pattern.hpp"
#include "fmpp/testfun.hpp"

namespace fmpp {

// ============================================================
// Edge corrections
// ============================================================

enum class EdgeCorrection { None, Isotropic, Translation };

// Largest isotropic weight used before capping; the cap binding is flagged
// on the output curves.
inline constexpr double kIsotropicWeightCap = 10.0;

// Reciprocal of the fraction of the circle of radius d around x whose
// circumference lies inside the rectangle W. Closed form; capped at
// kIsotropicWeightCap. hit_cap reports whether the cap bound.
double isotropic_weight(const GroundPoint& x, double d, const Window& window,
                        bool* hit_cap = nullptr);

// |W| / |W intersect (W + (x2-x1))| for rectangles; errors when a separation
// component reaches the window side (the overlap vanishes).
double translation_weight(const GroundPoint& x1, const GroundPoint& x2,
                          const Window& window);

// ============================================================
// Summary curves
// ============================================================

// Default number of distances: equispaced from 0 to r_max inclusive.
inline constexpr int kDefaultRGridSize = 50;

std::vector<double> make_r_grid(double r_max, int count = kDefaultRGridSize);
double default_r_max(const Window& window);  // min(width, height) / 4

struct SummaryCurve {
  std::vector<double> r;
  std::vector<double> values;
  int point_index = -1;          // -1 for global curves
  bool own_mark_in_set = true;   // false: the point's mark fails E, curve is zero
  bool iso_cap_hit = false;      // isotropic weight cap bound somewhere
};

// Mark-set filtering configuration: E applies to the focal point's mark,
// others[i] to the i-th companion. Normalisation divides by the empirical
// fractions of marks satisfying each predicate.
struct MarkSetConfig {
  MarkSetPredicate own = MarkSetPredicate::all_marks();
  std::vector<MarkSetPredicate> others;  // size n-1
};

struct KConfig {
  int n = 2;  // order: 2 or 3
  TestFunctionSpec testfun;
  EdgeCorrection edge = EdgeCorrection::Isotropic;
  std::optional<double> r_max;  // default: window min side / 4
  int r_grid_size = kDefaultRGridSize;
  std::optional<MarkSetConfig> mark_sets;
};

// ============================================================
// Engine
// ============================================================
//
// Precomputes everything that survives mark reshuffling (neighbor lists,
// edge weights, intensity denominators, the pairwise test-function table) and
// evaluates local curves for arbitrary mark assignments. Evaluation is
// side-effect-free; locals for distinct points can run concurrently.
class KEngine {
 public:
  KEngine(const MarkedPointPattern& pattern, const IntensityEstimate& intensity,
          const KConfig& config);

  const std::vector<double>& r_grid() const { return grid_; }
  int size() const { return k_; }
  double window_area() const { return area_; }
  const std::vector<int>& identity_assignment() const { return identity_; }

  PairTestMatrix::Context context(std::span<const int> assignment) const {
    return testmat_.context(assignment);
  }

  SummaryCurve local(int i) const;
  SummaryCurve local(int i, std::span<const int> assignment,
                     const PairTestMatrix::Context& ctx) const;

  // Low-level variant writing the curve values into out[0..grid−1].
  void local_values(int i, std::span<const int> assignment,
                    const PairTestMatrix::Context& ctx, double* out,
                    bool* cap_hit = nullptr, bool* own_in_set = nullptr) const;

  SummaryCurve global() const;
  SummaryCurve global(std::span<const int> assignment,
                      const PairTestMatrix::Context& ctx) const;

 private:
  struct Entry {        // one directed neighbor pair (i -> j)
    int j;
    double dist;
    double weight;      // edge-correction weight w(x_i, x_j)
    int bin;            // first grid index with r >= dist
    bool capped;
  };

  int k_ = 0;
  int n_ = 2;
  double area_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> rho_;          // intensity at the data points
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
  PairTestMatrix testmat_;
  std::vector<int> identity_;
  // Mark-set tables (empty when no mark sets are configured).
  bool has_sets_ = false;
  std::vector<char> in_own_;
  std::vector<std::vector<char>> in_other_;

  std::span<const Entry> row(int i) const {
    return {entries_.data() + offsets_[static_cast<std::size_t>(i)],
            offsets_[static_cast<std::size_t>(i) + 1] - offsets_[static_cast<std::size_t>(i)]};
  }
};

// ============================================================
// One-shot operations
// ============================================================

SummaryCurve local_k(const MarkedPointPattern& pattern, int point_index,
                     const IntensityEstimate& intensity, const KConfig& config);

std::vector<SummaryCurve> local_k_all(const MarkedPointPattern& pattern,
                                      const IntensityEstimate& intensity,
                                      const KConfig& config, int threads = 1);

// (1 / |W|) * sum of all local curves, accumulated in point-index order.
SummaryCurve global_k(const MarkedPointPattern& pattern,
                      const IntensityEstimate& intensity, const KConfig& config);

// CSV exports: local batch `r,value,point_index`, single curve `r,value`.
std::string curve_to_csv(const SummaryCurve& curve);
std::string curves_to_csv(std::span<const SummaryCurve> curves);

}  // namespace fmpp
