#include "fmpp/testfun.hpp"

#include <algorithm>
#include <cmath>

#include "fmpp/errors.hpp"

namespace fmpp {

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

namespace {

void check_pair(const FunctionalMark& f1, const FunctionalMark& f2) {
  if (!same_time_grid(f1, f2))
    throw_invalid("grid-mismatch: marks sample different time grids");
  require(f1.values.size() == f1.times->size() && f2.values.size() == f2.times->size(),
          "mark length does not match its time grid");
}

std::vector<double> difference_quotient(const FunctionalMark& f) {
  const TimeGrid& t = *f.times;
  const std::vector<double>& v = f.values;
  std::size_t n = v.size();
  std::vector<double> d(n);
  d[0] = (v[1] - v[0]) / (t[1] - t[0]);
  for (std::size_t k = 1; k + 1 < n; ++k)
    d[k] = (v[k + 1] - v[k - 1]) / (t[k + 1] - t[k - 1]);
  d[n - 1] = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
  return d;
}

double lp_of_diff(const TimeGrid& grid, std::span<const double> a,
                  std::span<const double> b, double p) {
  if (std::isinf(p)) {
    double sup = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      sup = std::max(sup, std::abs(a[k] - b[k]));
    return sup;
  }
  std::vector<double> w = trapezoid_weights(grid);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    acc += w[k] * std::pow(std::abs(a[k] - b[k]), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_distance(const FunctionalMark& f1, const FunctionalMark& f2, double p) {
  check_pair(f1, f2);
  require(p >= 1.0, "lp distance requires p >= 1");
  return lp_of_diff(*f1.times, f1.values, f2.values, p);
}

double variogram_testfun(const FunctionalMark& f1, const FunctionalMark& f2,
                         const std::vector<double>& mean_curve) {
  check_pair(f1, f2);
  require(mean_curve.size() == f1.values.size(),
          "grid-mismatch: mean curve length differs from marks");
  std::vector<double> w = trapezoid_weights(*f1.times);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    acc += w[k] * (f1.values[k] - mean_curve[k]) * (f2.values[k] - mean_curve[k]);
  return acc;
}

double lp_derivative_distance(const FunctionalMark& f1, const FunctionalMark& f2,
                              double p, int s) {
  check_pair(f1, f2);
  require(p >= 1.0, "lp distance requires p >= 1");
  if (s != 1) throw_invalid("unsupported-order: only first derivatives are supported");
  std::vector<double> d1 = difference_quotient(f1);
  std::vector<double> d2 = difference_quotient(f2);
  return lp_of_diff(*f1.times, d1, d2, p);
}

TestFunctionSpec TestFunctionSpec::parse(const std::string& kind_name, double p) {
  TestFunctionSpec spec;
  spec.p = p;
  if (kind_name == "lp") {
    spec.kind = std::isinf(p) ? TestFunctionKind::Supremum : TestFunctionKind::Lp;
  } else if (kind_name == "sup" || kind_name == "supremum") {
    spec.kind = TestFunctionKind::Supremum;
    spec.p = std::numeric_limits<double>::infinity();
  } else if (kind_name == "variogram") {
    spec.kind = TestFunctionKind::Variogram;
  } else if (kind_name == "dlp") {
    spec.kind = TestFunctionKind::LpDerivative;
  } else if (kind_name == "one") {
    spec.kind = TestFunctionKind::ConstantOne;
  } else {
    throw_invalid("unknown test function kind '" + kind_name + "'");
  }
  if (spec.kind == TestFunctionKind::Lp || spec.kind == TestFunctionKind::LpDerivative)
    require(p >= 1.0, "test function parameter p must be >= 1");
  return spec;
}

std::string TestFunctionSpec::kind_name() const {
  switch (kind) {
    case TestFunctionKind::Lp: return "lp";
    case TestFunctionKind::Supremum: return "sup";
    case TestFunctionKind::Variogram: return "variogram";
    case TestFunctionKind::LpDerivative: return "dlp";
    case TestFunctionKind::ConstantOne: return "one";
  }
  return "?";
}

PairTestMatrix::PairTestMatrix(const MarkedPointPattern& pattern,
                               const TestFunctionSpec& spec)
    : kind_(spec.kind), k_(pattern.size()) {
  if (kind_ == TestFunctionKind::ConstantOne || k_ == 0) return;  // no table needed
  const TimeGrid& grid = pattern.shared_time_grid();  // throws on mixed grids
  std::vector<double> w = trapezoid_weights(grid);
  base_.assign(static_cast<std::size_t>(k_) * k_, 0.0);

  auto at = [&](int a, int b) -> double& {
    return base_[static_cast<std::size_t>(a) * k_ + b];
  };

  if (kind_ == TestFunctionKind::Variogram) {
    // Gram matrix of the marks under the trapezoid inner product.
    for (int a = 0; a < k_; ++a) {
      const auto& va = pattern.mark(a).values;
      for (int b = a; b < k_; ++b) {
        const auto& vb = pattern.mark(b).values;
        double acc = 0.0;
        for (std::size_t t = 0; t < w.size(); ++t) acc += w[t] * va[t] * vb[t];
        at(a, b) = acc;
        at(b, a) = acc;
      }
    }
    return;
  }

  std::vector<std::vector<double>> curves(static_cast<std::size_t>(k_));
  for (int a = 0; a < k_; ++a) {
    if (kind_ == TestFunctionKind::LpDerivative)
      curves[static_cast<std::size_t>(a)] = difference_quotient(pattern.mark(a));
    else
      curves[static_cast<std::size_t>(a)] = pattern.mark(a).values;
  }
  double p = spec.p;
  if (kind_ == TestFunctionKind::Supremum) p = std::numeric_limits<double>::infinity();
  require(std::isinf(p) || p >= 1.0, "test function parameter p must be >= 1");
  for (int a = 0; a < k_; ++a)
    for (int b = a; b < k_; ++b) {
      double v = lp_of_diff(grid, curves[static_cast<std::size_t>(a)],
                            curves[static_cast<std::size_t>(b)], p);
      at(a, b) = v;
      at(b, a) = v;
    }
}

PairTestMatrix::Context PairTestMatrix::context(std::span<const int> assignment) const {
  Context ctx;
  if (kind_ != TestFunctionKind::Variogram) return ctx;
  require(static_cast<int>(assignment.size()) == k_,
          "assignment length does not match pattern size");
  ctx.mean_dot.assign(static_cast<std::size_t>(k_), 0.0);
  for (int a = 0; a < k_; ++a) {
    double acc = 0.0;
    for (int j : assignment) acc += base_[static_cast<std::size_t>(a) * k_ + j];
    ctx.mean_dot[static_cast<std::size_t>(a)] = acc / static_cast<double>(k_);
  }
  double grand = 0.0;
  for (int j : assignment) grand += ctx.mean_dot[static_cast<std::size_t>(j)];
  ctx.grand_mean = grand / static_cast<double>(k_);
  return ctx;
}

}  // namespace fmpp
