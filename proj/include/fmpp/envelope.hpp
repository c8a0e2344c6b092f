#pragma once

#include <string>
#include <vector>

namespace fmpp {

// One observed curve against Q simulated curves on a common grid.
struct CurveBundle {
  std::vector<double> r;
  std::vector<double> observed;
  std::vector<std::vector<double>> simulated;

  int q() const { return static_cast<int>(simulated.size()); }
};

struct EnvelopeResult {
  std::vector<double> lower;
  std::vector<double> upper;
  double p_value = 1.0;
  double alpha = 0.1;
  bool rejected = false;
  double erl_observed = 0.0;  // smallest pointwise rank of the observed curve
};

// Monte Carlo p-value by extreme-rank-length ordering. Pointwise ranks are
// two-sided by default: rank = 1 + min(#curves strictly below, #curves
// strictly above), computed among all Q+1 curves. A curve's rank vector is
// sorted ascending; curves compare lexicographically (smaller = more
// extreme; equal vectors tie). p = (1 + #{simulated curves at least as
// extreme as the observed}) / (Q + 1). With one_sided, only large values
// count as extreme.
double erl_p_value(const CurveBundle& bundle, bool one_sided = false);

// Pointwise min/max of the simulated curves that remain after discarding the
// floor(alpha * (Q+1)) - 1 most extreme ones in the same ERL ordering. The
// observed curve participates in the ranking pool but never in the bounds.
// When a tie group straddles the discard boundary the whole group is kept.
void envelope_bounds(const CurveBundle& bundle, double alpha,
                     std::vector<double>* lower, std::vector<double>* upper,
                     bool one_sided = false);

EnvelopeResult envelope_test(const CurveBundle& bundle, double alpha,
                             bool one_sided = false);

// CSV export: `r,observed,lower,upper`.
std::string envelope_to_csv(const CurveBundle& bundle, const EnvelopeResult& result);

}  // namespace fmpp
