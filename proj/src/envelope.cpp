#include "fmpp/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fmpp/errors.hpp"
#include "fmpp/pattern_io.hpp"

namespace fmpp {

namespace {

void check_bundle(const CurveBundle& bundle) {
  require(bundle.q() >= 1, "bundle needs at least one simulated curve");
  const std::size_t g = bundle.r.size();
  require(g >= 1, "bundle needs a non-empty grid");
  if (bundle.observed.size() != g)
    throw_invalid("grid-mismatch: observed curve length differs from grid");
  for (const auto& sim : bundle.simulated)
    if (sim.size() != g) throw_invalid("grid-mismatch: simulated curve length differs");
  for (double v : bundle.observed)
    require(std::isfinite(v), "observed curve has non-finite values");
  for (const auto& sim : bundle.simulated)
    for (double v : sim) require(std::isfinite(v), "simulated curve has non-finite values");
}

// Sorted pointwise-rank vectors for all Q+1 curves (index 0 = observed).
// Rank at a grid point: 1 + #strictly-below for one-sided-from-above tests
// flipped appropriately; two-sided takes the min of both sides. Ties share
// the extreme (minimum) rank.
std::vector<std::vector<int>> erl_vectors(const CurveBundle& bundle, bool one_sided) {
  const int m = bundle.q() + 1;
  const std::size_t g = bundle.r.size();
  std::vector<std::vector<int>> ranks(static_cast<std::size_t>(m));
  for (auto& rv : ranks) rv.reserve(g);

  std::vector<std::pair<double, int>> column(static_cast<std::size_t>(m));
  std::vector<int> rank_here(static_cast<std::size_t>(m));
  for (std::size_t gi = 0; gi < g; ++gi) {
    for (int c = 0; c < m; ++c) {
      double v = (c == 0) ? bundle.observed[gi]
                          : bundle.simulated[static_cast<std::size_t>(c - 1)][gi];
      column[static_cast<std::size_t>(c)] = {v, c};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // below-count = index of the first occurrence of the value;
    // above-count = m - 1 - index of the last occurrence.
    std::size_t start = 0;
    while (start < column.size()) {
      std::size_t end = start;
      while (end + 1 < column.size() && column[end + 1].first == column[start].first)
        ++end;
      int below = static_cast<int>(start);
      int above = static_cast<int>(column.size() - 1 - end);
      int rank = one_sided ? (1 + above) : (1 + std::min(below, above));
      for (std::size_t s = start; s <= end; ++s)
        rank_here[static_cast<std::size_t>(column[s].second)] = rank;
      start = end + 1;
    }
    for (int c = 0; c < m; ++c) ranks[static_cast<std::size_t>(c)].push_back(rank_here[static_cast<std::size_t>(c)]);
  }
  for (auto& rv : ranks) std::sort(rv.begin(), rv.end());
  return ranks;
}

// a more extreme than b: lexicographically smaller sorted rank vector.
int erl_compare(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

}  // namespace

double erl_p_value(const CurveBundle& bundle, bool one_sided) {
  check_bundle(bundle);
  auto ranks = erl_vectors(bundle, one_sided);
  int at_least_as_extreme = 0;
  for (int q = 1; q <= bundle.q(); ++q)
    if (erl_compare(ranks[static_cast<std::size_t>(q)], ranks[0]) <= 0)
      ++at_least_as_extreme;
  return static_cast<double>(1 + at_least_as_extreme) / (bundle.q() + 1);
}

void envelope_bounds(const CurveBundle& bundle, double alpha,
                     std::vector<double>* lower, std::vector<double>* upper,
                     bool one_sided) {
  check_bundle(bundle);
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const int q = bundle.q();
  int k_alpha = static_cast<int>(std::floor(alpha * (q + 1)));
  if (k_alpha < 1)
    throw_invalid("alpha-too-small-for-Q: floor(alpha * (Q+1)) must be >= 1");
  int discard = k_alpha - 1;

  auto ranks = erl_vectors(bundle, one_sided);
  std::vector<int> order(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) order[static_cast<std::size_t>(i)] = i + 1;  // sim indices in ranks
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return erl_compare(ranks[static_cast<std::size_t>(a)], ranks[static_cast<std::size_t>(b)]) < 0;
  });

  // Keep whole tie groups: if the discard boundary would split curves with
  // identical rank vectors, keep all of them.
  int cut = 0;
  while (cut < discard) {
    int next = cut + 1;
    while (next < q && erl_compare(ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(next)])],
                                   ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(cut)])]) == 0)
      ++next;
    if (next > discard) break;
    cut = next;
  }

  const std::size_t g = bundle.r.size();
  lower->assign(g, std::numeric_limits<double>::infinity());
  upper->assign(g, -std::numeric_limits<double>::infinity());
  for (int s = cut; s < q; ++s) {
    const auto& sim = bundle.simulated[static_cast<std::size_t>(order[static_cast<std::size_t>(s)] - 1)];
    for (std::size_t gi = 0; gi < g; ++gi) {
      (*lower)[gi] = std::min((*lower)[gi], sim[gi]);
      (*upper)[gi] = std::max((*upper)[gi], sim[gi]);
    }
  }
}

EnvelopeResult envelope_test(const CurveBundle& bundle, double alpha, bool one_sided) {
  EnvelopeResult result;
  result.alpha = alpha;
  result.p_value = erl_p_value(bundle, one_sided);
  result.rejected = result.p_value <= alpha;
  envelope_bounds(bundle, alpha, &result.lower, &result.upper, one_sided);
  auto ranks = erl_vectors(bundle, one_sided);
  result.erl_observed = ranks[0].empty() ? 0.0 : static_cast<double>(ranks[0][0]);
  return result;
}

std::string envelope_to_csv(const CurveBundle& bundle, const EnvelopeResult& result) {
  std::ostringstream out;
  out << "r,observed,lower,upper\n";
  for (std::size_t g = 0; g < bundle.r.size(); ++g)
    out << format_double(bundle.r[g]) << "," << format_double(bundle.observed[g]) << ","
        << format_double(result.lower[g]) << "," << format_double(result.upper[g])
        << "\n";
  return out.str();
}

}  // namespace fmpp
