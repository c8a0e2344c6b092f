#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fmpp {

// ============================================================
// Windows and ground points
// ============================================================

// Axis-aligned rectangular observation window.
struct Window {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  Window() = default;
  Window(double x0, double x1, double y0, double y1);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double min_side() const { return width() < height() ? width() : height(); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool contains(const Window& sub) const {
    return sub.x_min >= x_min && sub.x_max <= x_max && sub.y_min >= y_min &&
           sub.y_max <= y_max;
  }
};

inline Window unit_square() { return Window(0.0, 1.0, 0.0, 1.0); }

struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const GroundPoint& a, const GroundPoint& b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// ============================================================
// Functional marks
// ============================================================

using TimeGrid = std::vector<double>;
using TimeGridPtr = std::shared_ptr<const TimeGrid>;

// Curve sampled on a strictly increasing time grid. Grids are shared via
// shared_ptr since a pattern's marks normally live on one common grid.
struct FunctionalMark {
  TimeGridPtr times;
  std::vector<double> values;

  FunctionalMark() = default;
  FunctionalMark(TimeGridPtr t, std::vector<double> v)
      : times(std::move(t)), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
};

// Checks the grid itself: length >= 2, strictly increasing, finite.
bool time_grid_ok(const TimeGrid& grid);

// True when both marks sample the same grid (pointer or element-wise).
bool same_time_grid(const FunctionalMark& a, const FunctionalMark& b);

TimeGridPtr make_time_grid(double a, double b, int n);

// ============================================================
// Marked point patterns
// ============================================================

struct ValidationIssue {
  std::string code;  // duplicate-point | point-outside-window | mark-length-mismatch | ...
  int point_index = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

// Simple marked point pattern in a rectangular window: parallel vectors of
// ground points and functional marks. Immutable after construction; treat
// instances as values and share freely across threads.
class MarkedPointPattern {
 public:
  MarkedPointPattern() = default;
  MarkedPointPattern(Window window, std::vector<GroundPoint> points,
                     std::vector<FunctionalMark> marks);

  const Window& window() const { return window_; }
  const std::vector<GroundPoint>& points() const { return points_; }
  const std::vector<FunctionalMark>& marks() const { return marks_; }
  const GroundPoint& point(int i) const { return points_[static_cast<std::size_t>(i)]; }
  const FunctionalMark& mark(int i) const { return marks_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(points_.size()); }
  bool empty() const { return points_.empty(); }

  // True when every mark samples one common grid.
  bool has_shared_time_grid() const { return shared_time_grid_; }
  // The common grid; throws when grids differ or the pattern has no marks.
  const TimeGrid& shared_time_grid() const;

 private:
  Window window_;
  std::vector<GroundPoint> points_;
  std::vector<FunctionalMark> marks_;
  bool shared_time_grid_ = false;
};

// Full invariant check: sizes aligned, grids sane, points inside the window,
// no duplicate coordinates. Returns the list of violations instead of
// throwing so callers can report all of them at once.
ValidationReport validate(const MarkedPointPattern& pattern);

// Throws Error(Invalid) with the validation summary when the pattern is bad.
void require_valid(const MarkedPointPattern& pattern);

// Points (with their marks) falling inside sub; the window becomes sub.
// sub must be contained in pattern.window().
MarkedPointPattern restrict(const MarkedPointPattern& pattern, const Window& sub);

// Pointwise average of all marks (marks must share a grid).
std::vector<double> mean_mark_curve(const MarkedPointPattern& pattern);

// ============================================================
// Mark set predicates
// ============================================================

// Named deterministic boolean functional of a mark, standing in for a mark
// set E subset of the mark space. Normalisations use the empirical fraction
// of pattern marks satisfying the predicate.
class MarkSetPredicate {
 public:
  // kinds: "all" | "sup_ge" (sup of values in [t0,t1] >= threshold) |
  //        "mean_ge" (grid mean >= threshold)
  static MarkSetPredicate all_marks();
  static MarkSetPredicate sup_in_interval_ge(double t0, double t1, double threshold);
  static MarkSetPredicate mean_ge(double threshold);

  bool operator()(const FunctionalMark& mark) const { return fn_(mark); }
  const std::string& name() const { return name_; }

 private:
  MarkSetPredicate(std::string name, std::function<bool(const FunctionalMark&)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  std::function<bool(const FunctionalMark&)> fn_;
};

}  // namespace fmpp
