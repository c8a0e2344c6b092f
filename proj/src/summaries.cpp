#include "fmpp/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fmpp/errors.hpp"
#include "fmpp/parallel.hpp"
#include "fmpp/pattern_io.hpp"

namespace fmpp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

// ============================================================
// Edge corrections
// ============================================================

double isotropic_weight(const GroundPoint& x, double d, const Window& window,
                        bool* hit_cap) {
  require(d > 0.0, "zero-distance: isotropic weight needs d > 0");
  require(window.contains(x.x, x.y), "isotropic weight: point outside window");
  if (hit_cap) *hit_cap = false;

  // Distances to the four sides, in cyclic order left, bottom, right, top so
  // that adjacent entries share a corner.
  double side[4] = {x.x - window.x_min, x.y - window.y_min, window.x_max - x.x,
                    window.y_max - x.y};

  auto half_angle = [&](double dist) {
    if (dist >= d) return 0.0;
    return std::acos(std::max(-1.0, std::min(1.0, dist / d)));
  };

  // Exterior arc = sum of per-side arcs minus the double-counted overlap at
  // each corner where both adjacent sides cut the circle.
  double exterior = 0.0;
  for (int s = 0; s < 4; ++s) exterior += 2.0 * half_angle(side[s]);
  for (int c = 0; c < 4; ++c) {
    double overlap = half_angle(side[c]) + half_angle(side[(c + 1) % 4]) - kPi / 2.0;
    if (overlap > 0.0) exterior -= overlap;
  }

  double inside = kTwoPi - exterior;
  double weight = (inside <= 0.0) ? std::numeric_limits<double>::infinity()
                                  : kTwoPi / inside;
  if (weight > kIsotropicWeightCap) {
    if (hit_cap) *hit_cap = true;
    return kIsotropicWeightCap;
  }
  return weight;
}

double translation_weight(const GroundPoint& x1, const GroundPoint& x2,
                          const Window& window) {
  double dx = std::abs(x2.x - x1.x);
  double dy = std::abs(x2.y - x1.y);
  double ox = window.width() - dx;
  double oy = window.height() - dy;
  if (ox <= 0.0 || oy <= 0.0)
    throw_invalid("out-of-range: translation separation reaches the window side");
  return window.area() / (ox * oy);
}

// ============================================================
// Grids
// ============================================================

double default_r_max(const Window& window) { return window.min_side() / 4.0; }

std::vector<double> make_r_grid(double r_max, int count) {
  require(r_max > 0.0, "r_max must be positive");
  require(count >= 2, "r grid needs at least 2 values");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int g = 0; g < count; ++g)
    grid[static_cast<std::size_t>(g)] = r_max * static_cast<double>(g) / (count - 1);
  return grid;
}

// ============================================================
// Engine
// ============================================================

KEngine::KEngine(const MarkedPointPattern& pattern, const IntensityEstimate& intensity,
                 const KConfig& config)
    : k_(pattern.size()),
      n_(config.n),
      area_(pattern.window().area()),
      testmat_(pattern, config.testfun) {
  require(config.n == 2 || config.n == 3, "order n must be 2 or 3");
  require_valid(pattern);

  double r_max = config.r_max.value_or(default_r_max(pattern.window()));
  grid_ = make_r_grid(r_max, config.r_grid_size);

  rho_.resize(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    rho_[static_cast<std::size_t>(i)] = intensity.value_at(pattern.point(i));
    if (!(rho_[static_cast<std::size_t>(i)] > 0.0))
      throw_invalid("nonpositive-intensity at point " + std::to_string(i));
  }

  identity_.resize(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) identity_[static_cast<std::size_t>(i)] = i;

  if (config.mark_sets) {
    has_sets_ = true;
    require(static_cast<int>(config.mark_sets->others.size()) == n_ - 1,
            "mark_sets.others must have n-1 predicates");
    in_own_.resize(static_cast<std::size_t>(k_));
    for (int a = 0; a < k_; ++a)
      in_own_[static_cast<std::size_t>(a)] = config.mark_sets->own(pattern.mark(a)) ? 1 : 0;
    in_other_.resize(config.mark_sets->others.size());
    for (std::size_t e = 0; e < in_other_.size(); ++e) {
      in_other_[e].resize(static_cast<std::size_t>(k_));
      for (int a = 0; a < k_; ++a)
        in_other_[e][static_cast<std::size_t>(a)] =
            config.mark_sets->others[e](pattern.mark(a)) ? 1 : 0;
    }
  }

  // Directed neighbor pairs within r_max with their edge weights and grid
  // bins; all of it is invariant under mark reshuffling.
  NeighborLists neighbors(pattern.points(), pattern.window(), r_max);
  offsets_.assign(static_cast<std::size_t>(k_) + 1, 0);
  for (int i = 0; i < k_; ++i) {
    auto list = neighbors.of(i);
    offsets_[static_cast<std::size_t>(i) + 1] =
        offsets_[static_cast<std::size_t>(i)] + list.size();
  }
  entries_.resize(offsets_.back());
  for (int i = 0; i < k_; ++i) {
    auto list = neighbors.of(i);
    std::size_t base = offsets_[static_cast<std::size_t>(i)];
    for (std::size_t s = 0; s < list.size(); ++s) {
      Entry e;
      e.j = list[s].index;
      e.dist = list[s].dist;
      e.capped = false;
      switch (config.edge) {
        case EdgeCorrection::None:
          e.weight = 1.0;
          break;
        case EdgeCorrection::Isotropic:
          e.weight = isotropic_weight(pattern.point(i), e.dist, pattern.window(),
                                      &e.capped);
          break;
        case EdgeCorrection::Translation:
          e.weight = translation_weight(pattern.point(i), pattern.point(e.j),
                                        pattern.window());
          break;
      }
      e.bin = static_cast<int>(
          std::lower_bound(grid_.begin(), grid_.end(), e.dist) - grid_.begin());
      entries_[base + s] = e;
    }
  }
}

void KEngine::local_values(int i, std::span<const int> assignment,
                           const PairTestMatrix::Context& ctx, double* out,
                           bool* cap_hit, bool* own_in_set) const {
  require(i >= 0 && i < k_, "index-out-of-range: point " + std::to_string(i));
  require(static_cast<int>(assignment.size()) == k_,
          "assignment length does not match pattern size");
  const std::size_t g = grid_.size();
  std::fill(out, out + g, 0.0);
  if (cap_hit) *cap_hit = false;
  if (own_in_set) *own_in_set = true;

  const int mi = assignment[static_cast<std::size_t>(i)];

  // Normalisation by empirical mark-set fractions of the assigned multiset.
  double norm = 1.0;
  if (has_sets_) {
    if (!in_own_[static_cast<std::size_t>(mi)]) {
      if (own_in_set) *own_in_set = false;
      return;  // zero curve, flagged
    }
    double frac_own = 0.0;
    for (int a : assignment) frac_own += in_own_[static_cast<std::size_t>(a)];
    frac_own /= static_cast<double>(k_);
    std::vector<double> frac_other(in_other_.size(), 0.0);
    for (std::size_t e = 0; e < in_other_.size(); ++e) {
      for (int a : assignment) frac_other[e] += in_other_[e][static_cast<std::size_t>(a)];
      frac_other[e] /= static_cast<double>(k_);
      if (frac_other[e] == 0.0) return;  // no companions possible: zero curve
    }
    norm = 1.0 / frac_own;
    for (double f : frac_other) norm /= f;
  }

  const double inv_rho_i = 1.0 / rho_[static_cast<std::size_t>(i)];
  auto list = row(i);

  if (n_ == 2) {
    for (const Entry& e : list) {
      const int mj = assignment[static_cast<std::size_t>(e.j)];
      if (has_sets_ && !in_other_[0][static_cast<std::size_t>(mj)]) continue;
      if (e.capped && cap_hit) *cap_hit = true;
      double term = e.weight * testmat_.value(mi, mj, ctx) * inv_rho_i /
                    rho_[static_cast<std::size_t>(e.j)];
      out[static_cast<std::size_t>(e.bin)] += term;
    }
  } else {
    // Ordered distinct pairs of r-close neighbors; the contribution enters
    // at the larger of the two distances. Weight is the product of the two
    // pairwise weights.
    for (std::size_t a = 0; a < list.size(); ++a) {
      const Entry& ea = list[a];
      const int ma = assignment[static_cast<std::size_t>(ea.j)];
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const Entry& eb = list[b];
        const int mb = assignment[static_cast<std::size_t>(eb.j)];
        double set_factor = 2.0;
        if (has_sets_) {
          double fwd = (in_other_[0][static_cast<std::size_t>(ma)] &&
                        in_other_[1][static_cast<std::size_t>(mb)])
                           ? 1.0
                           : 0.0;
          double rev = (in_other_[0][static_cast<std::size_t>(mb)] &&
                        in_other_[1][static_cast<std::size_t>(ma)])
                           ? 1.0
                           : 0.0;
          set_factor = fwd + rev;
          if (set_factor == 0.0) continue;
        }
        if ((ea.capped || eb.capped) && cap_hit) *cap_hit = true;
        double term = set_factor * ea.weight * eb.weight *
                      testmat_.value3(mi, ma, mb, ctx) * inv_rho_i /
                      (rho_[static_cast<std::size_t>(ea.j)] *
                       rho_[static_cast<std::size_t>(eb.j)]);
        int bin = std::max(ea.bin, eb.bin);
        out[static_cast<std::size_t>(bin)] += term;
      }
    }
  }

  double acc = 0.0;
  for (std::size_t gi = 0; gi < g; ++gi) {
    acc += out[gi];
    out[gi] = acc * norm;
  }
}

SummaryCurve KEngine::local(int i) const {
  return local(i, identity_, testmat_.context(identity_));
}

SummaryCurve KEngine::local(int i, std::span<const int> assignment,
                            const PairTestMatrix::Context& ctx) const {
  SummaryCurve curve;
  curve.r = grid_;
  curve.values.resize(grid_.size());
  curve.point_index = i;
  local_values(i, assignment, ctx, curve.values.data(), &curve.iso_cap_hit,
               &curve.own_mark_in_set);
  return curve;
}

SummaryCurve KEngine::global() const {
  return global(identity_, testmat_.context(identity_));
}

SummaryCurve KEngine::global(std::span<const int> assignment,
                             const PairTestMatrix::Context& ctx) const {
  SummaryCurve curve;
  curve.r = grid_;
  curve.values.assign(grid_.size(), 0.0);
  curve.point_index = -1;
  std::vector<double> scratch(grid_.size());
  for (int i = 0; i < k_; ++i) {
    bool cap = false;
    local_values(i, assignment, ctx, scratch.data(), &cap);
    curve.iso_cap_hit = curve.iso_cap_hit || cap;
    for (std::size_t g = 0; g < scratch.size(); ++g) curve.values[g] += scratch[g];
  }
  for (double& v : curve.values) v /= area_;
  return curve;
}

// ============================================================
// One-shot operations
// ============================================================

SummaryCurve local_k(const MarkedPointPattern& pattern, int point_index,
                     const IntensityEstimate& intensity, const KConfig& config) {
  KEngine engine(pattern, intensity, config);
  return engine.local(point_index);
}

std::vector<SummaryCurve> local_k_all(const MarkedPointPattern& pattern,
                                      const IntensityEstimate& intensity,
                                      const KConfig& config, int threads) {
  KEngine engine(pattern, intensity, config);
  auto ctx = engine.context(engine.identity_assignment());
  std::vector<SummaryCurve> curves(static_cast<std::size_t>(engine.size()));
  parallel_for(engine.size(), threads, [&](int i) {
    curves[static_cast<std::size_t>(i)] =
        engine.local(i, engine.identity_assignment(), ctx);
  });
  return curves;
}

SummaryCurve global_k(const MarkedPointPattern& pattern,
                      const IntensityEstimate& intensity, const KConfig& config) {
  KEngine engine(pattern, intensity, config);
  return engine.global();
}

std::string curve_to_csv(const SummaryCurve& curve) {
  std::ostringstream out;
  out << "r,value\n";
  for (std::size_t g = 0; g < curve.r.size(); ++g)
    out << format_double(curve.r[g]) << "," << format_double(curve.values[g]) << "\n";
  return out.str();
}

std::string curves_to_csv(std::span<const SummaryCurve> curves) {
  std::ostringstream out;
  out << "r,value,point_index\n";
  for (const auto& curve : curves)
    for (std::size_t g = 0; g < curve.r.size(); ++g)
      out << format_double(curve.r[g]) << "," << format_double(curve.values[g]) << ","
          << curve.point_index << "\n";
  return out.str();
}

}  // namespace fmpp
