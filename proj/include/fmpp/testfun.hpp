#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fmpp/pattern.hpp"

namespace fmpp {

// ============================================================
// Mark test functions
// ============================================================
//
// Real-valued functionals of mark pairs used as weights in the summary
// statistics. All integrals are trapezoid sums on the stored grid; marks on
// different grids are a hard error (no silent resampling).

// Trapezoid quadrature weights for a (possibly non-uniform) grid.
std::vector<double> trapezoid_weights(const TimeGrid& grid);

// (integral |f1-f2|^p dt)^(1/p); p = infinity gives the supremum metric.
double lp_distance(const FunctionalMark& f1, const FunctionalMark& f2, double p);

// integral (f1 - mean)(f2 - mean) dt; may be negative.
double variogram_testfun(const FunctionalMark& f1, const FunctionalMark& f2,
                         const std::vector<double>& mean_curve);

// lp distance between difference-quotient curves (central differences,
// one-sided at the ends). Only s = 1 is supported.
double lp_derivative_distance(const FunctionalMark& f1, const FunctionalMark& f2,
                              double p, int s = 1);

enum class TestFunctionKind { Lp, Supremum, Variogram, LpDerivative, ConstantOne };

struct TestFunctionSpec {
  TestFunctionKind kind = TestFunctionKind::Lp;
  double p = 2.0;

  static TestFunctionSpec parse(const std::string& kind_name, double p);
  std::string kind_name() const;
};

// ============================================================
// Pairwise evaluation under mark reassignment
// ============================================================
//
// The summary engines evaluate t on mark pairs indexed by mark identity, so
// a Monte Carlo run that reshuffles marks across points reuses one
// precomputed k x k table. The variogram kind needs the mean curve of the
// current mark multiset, which changes under resampling with replacement;
// it is handled exactly through the Gram matrix
//   t(a,b | assignment) = G(a,b) - u(a) - u(b) + c,
// with u(a) the mean of G(a, .) over assigned marks and c the grand mean.
class PairTestMatrix {
 public:
  PairTestMatrix(const MarkedPointPattern& pattern, const TestFunctionSpec& spec);

  struct Context {
    std::vector<double> mean_dot;  // variogram only
    double grand_mean = 0.0;
  };

  // assignment[j] = index of the mark carried by point j.
  Context context(std::span<const int> assignment) const;

  double value(int a, int b, const Context& ctx) const {
    if (kind_ == TestFunctionKind::ConstantOne) return 1.0;
    double base = base_[static_cast<std::size_t>(a) * k_ + b];
    if (kind_ != TestFunctionKind::Variogram) return base;
    return base - ctx.mean_dot[static_cast<std::size_t>(a)] -
           ctx.mean_dot[static_cast<std::size_t>(b)] + ctx.grand_mean;
  }

  // Three-mark value: sum of the three pairwise values.
  double value3(int a, int b, int c, const Context& ctx) const {
    return value(a, b, ctx) + value(a, c, ctx) + value(b, c, ctx);
  }

  int marks() const { return k_; }
  TestFunctionKind kind() const { return kind_; }

 private:
  TestFunctionKind kind_;
  int k_ = 0;
  std::vector<double> base_;  // t values, or the Gram matrix for variogram
};

}  // namespace fmpp
