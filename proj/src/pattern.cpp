#include "fmpp/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fmpp/errors.hpp"

namespace fmpp {

Window::Window(double x0, double x1, double y0, double y1)
    : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
  if (!(std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1)))
    throw_invalid("window bounds must be finite");
  if (!(x_min < x_max && y_min < y_max))
    throw_invalid("window requires x_min < x_max and y_min < y_max");
}

bool time_grid_ok(const TimeGrid& grid) {
  if (grid.size() < 2) return false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) return false;
    if (i > 0 && !(grid[i] > grid[i - 1])) return false;
  }
  return true;
}

bool same_time_grid(const FunctionalMark& a, const FunctionalMark& b) {
  if (a.times == b.times) return a.times != nullptr;
  if (!a.times || !b.times) return false;
  return *a.times == *b.times;
}

TimeGridPtr make_time_grid(double a, double b, int n) {
  require(n >= 2, "time grid needs at least 2 samples");
  require(a < b, "time grid needs a < b");
  auto grid = std::make_shared<TimeGrid>();
  grid->resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    (*grid)[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return grid;
}

std::string ValidationReport::summary() const {
  if (issues.empty()) return "ok";
  std::ostringstream out;
  out << issues.size() << " issue(s):";
  for (const auto& issue : issues) {
    out << " [" << issue.code;
    if (issue.point_index >= 0) out << " @" << issue.point_index;
    out << ": " << issue.message << "]";
  }
  return out.str();
}

MarkedPointPattern::MarkedPointPattern(Window window, std::vector<GroundPoint> points,
                                       std::vector<FunctionalMark> marks)
    : window_(window), points_(std::move(points)), marks_(std::move(marks)) {
  shared_time_grid_ = !marks_.empty();
  for (std::size_t i = 1; i < marks_.size() && shared_time_grid_; ++i)
    shared_time_grid_ = same_time_grid(marks_[0], marks_[i]);
  if (!marks_.empty() && !marks_[0].times) shared_time_grid_ = false;
}

const TimeGrid& MarkedPointPattern::shared_time_grid() const {
  require(!marks_.empty(), "pattern has no marks");
  require(shared_time_grid_, "marks do not share a common time grid");
  return *marks_[0].times;
}

ValidationReport validate(const MarkedPointPattern& pattern) {
  ValidationReport report;
  auto add = [&](std::string code, int index, std::string message) {
    report.issues.push_back({std::move(code), index, std::move(message)});
  };

  const auto& pts = pattern.points();
  const auto& marks = pattern.marks();
  if (pts.size() != marks.size()) {
    add("mark-count-mismatch", -1,
        std::to_string(pts.size()) + " points vs " + std::to_string(marks.size()) + " marks");
    return report;
  }

  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y))
      add("point-not-finite", static_cast<int>(i), "non-finite coordinates");
    else if (!pattern.window().contains(pts[i].x, pts[i].y))
      add("point-outside-window", static_cast<int>(i),
          "(" + std::to_string(pts[i].x) + ", " + std::to_string(pts[i].y) + ")");
  }

  for (std::size_t i = 0; i < marks.size(); ++i) {
    const auto& m = marks[i];
    if (!m.times || !time_grid_ok(*m.times)) {
      add("bad-time-grid", static_cast<int>(i), "missing or non-increasing time grid");
      continue;
    }
    if (m.values.size() != m.times->size())
      add("mark-length-mismatch", static_cast<int>(i),
          std::to_string(m.values.size()) + " values vs " +
              std::to_string(m.times->size()) + " times");
    for (double v : m.values)
      if (!std::isfinite(v)) {
        add("mark-not-finite", static_cast<int>(i), "non-finite mark value");
        break;
      }
  }

  // Duplicate coordinates violate simplicity. Sort an index array so the
  // check stays O(n log n).
  std::vector<int> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
    return pts[a].y < pts[b].y;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = pts[order[i - 1]];
    const auto& b = pts[order[i]];
    if (a.x == b.x && a.y == b.y)
      add("duplicate-point", order[i],
          "coincides with point " + std::to_string(order[i - 1]));
  }

  return report;
}

void require_valid(const MarkedPointPattern& pattern) {
  ValidationReport report = validate(pattern);
  if (!report.ok()) throw_invalid("invalid pattern: " + report.summary());
}

MarkedPointPattern restrict(const MarkedPointPattern& pattern, const Window& sub) {
  if (!pattern.window().contains(sub))
    throw_invalid("sub-not-contained: restriction window exceeds the pattern window");
  std::vector<GroundPoint> points;
  std::vector<FunctionalMark> marks;
  for (int i = 0; i < pattern.size(); ++i) {
    if (sub.contains(pattern.point(i).x, pattern.point(i).y)) {
      points.push_back(pattern.point(i));
      marks.push_back(pattern.mark(i));
    }
  }
  return MarkedPointPattern(sub, std::move(points), std::move(marks));
}

std::vector<double> mean_mark_curve(const MarkedPointPattern& pattern) {
  const TimeGrid& grid = pattern.shared_time_grid();
  std::vector<double> mean(grid.size(), 0.0);
  for (const auto& mark : pattern.marks())
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += mark.values[k];
  for (double& v : mean) v /= static_cast<double>(pattern.size());
  return mean;
}

MarkSetPredicate MarkSetPredicate::all_marks() {
  return MarkSetPredicate("all", [](const FunctionalMark&) { return true; });
}

MarkSetPredicate MarkSetPredicate::sup_in_interval_ge(double t0, double t1,
                                                      double threshold) {
  std::string name = "sup_ge(" + std::to_string(t0) + "," + std::to_string(t1) + ";" +
                     std::to_string(threshold) + ")";
  return MarkSetPredicate(name, [t0, t1, threshold](const FunctionalMark& m) {
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.values.size(); ++k) {
      double t = (*m.times)[k];
      if (t >= t0 && t <= t1 && m.values[k] > sup) sup = m.values[k];
    }
    return sup >= threshold;
  });
}

MarkSetPredicate MarkSetPredicate::mean_ge(double threshold) {
  return MarkSetPredicate("mean_ge(" + std::to_string(threshold) + ")",
                          [threshold](const FunctionalMark& m) {
                            if (m.values.empty()) return false;
                            double s = 0.0;
                            for (double v : m.values) s += v;
                            return s / static_cast<double>(m.values.size()) >= threshold;
                          });
}

}  // namespace fmpp
