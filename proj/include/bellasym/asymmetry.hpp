#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "game.hpp"
#include "solver.hpp"
#include "util.hpp"

namespace bellasym {

// One row of an asymmetry sweep.  r_xy is the bound at the row's budgets,
// r_yx the bound with the two parties' budgets swapped; delta their
// absolute difference (the intrinsic asymmetry when one budget is zero).
// d_a and d_b are the gains of r_xy and r_yx over the blind bound
// R(0, 0), so delta = |d_a - d_b| by construction.
struct CurvePoint {
  double xi_x = 0.0;
  double xi_y = 0.0;
  double r_xy = 0.0;
  double r_yx = 0.0;
  double delta = 0.0;
  double d_a = 0.0;
  double d_b = 0.0;
};

struct SweepOptions {
  std::size_t steps = 21;  // grid points per axis, endpoints included
  std::size_t heights = kDefaultHeights;
  bool two_param = false;  // full (xi_x, xi_y) grid instead of one axis
};

namespace detail {

// Memoized budget solves against one solver instance; sweep grids hit the
// same budgets repeatedly (every row needs the blind bound, the two-param
// grid needs each swapped pair twice).
class SweepCache {
 public:
  explicit SweepCache(const GameTable& g, std::size_t heights)
      : solver_(g, heights), game_(g) {}

  double value(double xi_x, double xi_y) {
    std::uint64_t kx, ky;
    std::memcpy(&kx, &xi_x, sizeof kx);
    std::memcpy(&ky, &xi_y, sizeof ky);
    const auto key = std::make_pair(kx, ky);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double v =
        solver_.solve(KnowledgeBudget::for_game(game_, xi_x, xi_y)).value;
    memo_.emplace(key, v);
    return v;
  }

 private:
  AdversarialBoundSolver solver_;
  GameTable game_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> memo_;
};

inline CurvePoint make_point(SweepCache& cache, double xi_x, double xi_y,
                             double blind) {
  CurvePoint p;
  p.xi_x = xi_x;
  p.xi_y = xi_y;
  p.r_xy = cache.value(xi_x, xi_y);
  p.r_yx = cache.value(xi_y, xi_x);
  p.delta = std::abs(p.r_xy - p.r_yx);
  p.d_a = p.r_xy - blind;
  p.d_b = p.r_yx - blind;
  return p;
}

}  // namespace detail

// The asymmetry row at a single pair of budgets.
inline CurvePoint asymmetry_point(const GameTable& g, double xi_x, double xi_y,
                                  std::size_t heights = kDefaultHeights) {
  detail::SweepCache cache(g, heights);
  return detail::make_point(cache, xi_x, xi_y, cache.value(0.0, 0.0));
}

// Intrinsic asymmetry at knowledge level xi: how much more (or less) the
// bound moves when the known side is Alice rather than Bob.
inline double intrinsic_asymmetry(const GameTable& g, double xi,
                                  std::size_t heights = kDefaultHeights) {
  return asymmetry_point(g, xi, 0.0, heights).delta;
}

// Sweep the knowledge axis (or the full two-budget grid) on an evenly
// spaced grid with both endpoints.  One-parameter rows place the budget
// on Alice's side, so r_xy traces R(xi, 0) and r_yx traces R(0, xi).
inline std::vector<CurvePoint> sweep_curve(const GameTable& g,
                                           const SweepOptions& opt = {}) {
  if (opt.steps < 2)
    throw ValidationError("sweep needs at least two grid points");
  detail::SweepCache cache(g, opt.heights);
  const double blind = cache.value(0.0, 0.0);
  const double denom = static_cast<double>(opt.steps - 1);
  std::vector<CurvePoint> rows;
  if (!opt.two_param) {
    rows.reserve(opt.steps);
    for (std::size_t i = 0; i < opt.steps; ++i)
      rows.push_back(detail::make_point(
          cache, static_cast<double>(i) / denom, 0.0, blind));
  } else {
    rows.reserve(opt.steps * opt.steps);
    for (std::size_t i = 0; i < opt.steps; ++i)
      for (std::size_t j = 0; j < opt.steps; ++j)
        rows.push_back(detail::make_point(cache,
                                          static_cast<double>(i) / denom,
                                          static_cast<double>(j) / denom,
                                          blind));
  }
  return rows;
}

inline std::string curve_csv(const std::vector<CurvePoint>& rows) {
  std::string out = "xi_x,xi_y,r_xy,r_yx,delta,d_a,d_b\n";
  for (const CurvePoint& p : rows) {
    out += detail::format_fixed(p.xi_x) + "," + detail::format_fixed(p.xi_y) +
           "," + detail::format_fixed(p.r_xy) + "," +
           detail::format_fixed(p.r_yx) + "," + detail::format_fixed(p.delta) +
           "," + detail::format_fixed(p.d_a) + "," +
           detail::format_fixed(p.d_b) + "\n";
  }
  return out;
}

struct SymmetryReport {
  bool shape_compatible = false;   // equal setting and outcome counts
  bool transpose_invariant = false;
  bool has_difference = false;
  std::size_t diff_x = 0, diff_a = 0, diff_y = 0, diff_b = 0;
  double value_forward = 0.0;
  double value_transposed = 0.0;
};

// Is the game equal to its own party swap?  Exact entry-wise comparison;
// reports the lexicographically first differing coefficient.
inline SymmetryReport check_symmetry(const GameTable& g) {
  SymmetryReport rep;
  rep.shape_compatible = g.n_settings_a() == g.n_settings_b() &&
                         g.n_outcomes_a() == g.n_outcomes_b();
  if (!rep.shape_compatible) return rep;
  const GameTable t = transpose_game(g);
  for (std::size_t x = 0; x < g.n_settings_a(); ++x)
    for (std::size_t a = 0; a < g.n_outcomes_a(); ++a)
      for (std::size_t y = 0; y < g.n_settings_b(); ++y)
        for (std::size_t b = 0; b < g.n_outcomes_b(); ++b) {
          if (g.coeff(x, a, y, b) != t.coeff(x, a, y, b)) {
            rep.has_difference = true;
            rep.diff_x = x;
            rep.diff_a = a;
            rep.diff_y = y;
            rep.diff_b = b;
            rep.value_forward = g.coeff(x, a, y, b);
            rep.value_transposed = t.coeff(x, a, y, b);
            rep.transpose_invariant = false;
            return rep;
          }
        }
  rep.transpose_invariant = g.marginals_a() == t.marginals_a() &&
                            g.marginals_b() == t.marginals_b();
  return rep;
}

}  // namespace bellasym
