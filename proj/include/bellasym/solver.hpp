#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adversary.hpp"
#include "errors.hpp"
#include "game.hpp"
#include "lhv.hpp"
#include "lp.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace bellasym {

inline constexpr std::size_t kDefaultHeights = 8;
inline constexpr std::size_t kDefaultOracleRestarts = 8;

enum class Party { A, B };
enum class KnowledgeSide { A, B, Both };

// A two-level setting distribution: probability `peak_prob` on every
// member of `peak_set`, `tail_prob` elsewhere.  These are the only
// distributions the bound solver needs: any setting distribution is a
// mixture of flat peaks, each of which carries at least as much
// min-entropy, so restricting Eve to two-level rows loses nothing.
struct TwoLevelDistribution {
  std::size_t n_settings = 0;
  std::vector<std::size_t> peak_set;  // sorted setting indices
  double peak_prob = 0.0;
  double tail_prob = 0.0;

  std::vector<double> to_vector() const {
    std::vector<double> v(n_settings, tail_prob);
    for (std::size_t x : peak_set) v[x] = peak_prob;
    return v;
  }

  // Min-entropy carried by this row, -log2 of the peak.
  double min_entropy_bits() const { return -std::log2(peak_prob) + 0.0; }
};

// One symbol of the discretized hidden alphabet: a deterministic response
// paired with a two-level setting distribution.  log_peak caches
// log2(peak_prob) for the budget accounting.
struct ExpandedAtom {
  std::vector<std::size_t> response;
  TwoLevelDistribution settings;
  double log_peak = 0.0;
};

struct ExpandedAlphabet {
  std::vector<ExpandedAtom> atoms;
  // The distinct setting distributions the atoms draw from, in
  // enumeration order.  Atoms are grouped response-major over this list.
  std::vector<TwoLevelDistribution> settings_family;
};

namespace detail {

// All two-level distributions over n settings whose peaks lie on a
// geometric grid of `heights` points between uniform (1/n) and flat on
// the peak set (1/|S|).  Peak sets are enumerated by size then
// lexicographically; duplicate vectors (every set's lowest height is the
// uniform distribution) keep their first occurrence.
inline std::vector<TwoLevelDistribution> two_level_family(std::size_t n,
                                                          std::size_t heights) {
  if (heights < 2)
    throw ValidationError("height grid needs at least two points");
  std::vector<TwoLevelDistribution> family;
  std::set<std::vector<double>> seen;
  for (std::size_t s = 1; s <= n; ++s) {
    // lexicographic combinations of size s
    std::vector<std::size_t> combo(s);
    for (std::size_t i = 0; i < s; ++i) combo[i] = i;
    for (;;) {
      for (std::size_t k = 0; k < heights; ++k) {
        double h;
        if (k == 0)
          h = 1.0 / static_cast<double>(n);
        else if (k == heights - 1)
          h = 1.0 / static_cast<double>(s);
        else
          h = (1.0 / static_cast<double>(n)) *
              std::pow(static_cast<double>(n) / static_cast<double>(s),
                       static_cast<double>(k) /
                           static_cast<double>(heights - 1));
        const double t =
            s == n ? 0.0
                   : std::max(0.0, (1.0 - static_cast<double>(s) * h) /
                                       static_cast<double>(n - s));
        TwoLevelDistribution d{n, combo, h, t};
        if (seen.insert(d.to_vector()).second) family.push_back(std::move(d));
        if (s == n) break;  // only one height exists on the full set
      }
      // next combination
      std::size_t i = s;
      while (i-- > 0) {
        if (combo[i] + 1 <= n - s + i) {
          ++combo[i];
          for (std::size_t j = i + 1; j < s; ++j) combo[j] = combo[j - 1] + 1;
          break;
        }
        if (i == 0) {
          i = s + 1;  // exhausted
          break;
        }
      }
      if (i == s + 1 || s == 0) break;
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return family;
}

// Best score two setting rows can reach when each symbol answers
// deterministically: maximize over Bob's response g (odometer order) and,
// inside, the best Alice outcome per setting.  Ties keep the first
// maximizer.  Optionally reports the maximizing responses.
inline double best_response_value(const GameTable& g,
                                  const std::vector<double>& da,
                                  const std::vector<double>& db,
                                  std::vector<std::size_t>* f_out,
                                  std::vector<std::size_t>* g_out) {
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  const std::uint64_t gb = checked_pow(mb, nb, kDefaultEnumerationCap);
  if (gb > kDefaultEnumerationCap)
    throw CapacityError("response enumeration for party B is too large");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> gfun(nb, 0), fbuf(na), best_f, best_g;
  for (std::uint64_t gi = 0; gi < gb; ++gi) {
    double v = 0.0;
    for (std::size_t x = 0; x < na; ++x) {
      double bx = -std::numeric_limits<double>::infinity();
      std::size_t ba = 0;
      for (std::size_t a = 0; a < ma; ++a) {
        double s = 0.0;
        for (std::size_t y = 0; y < nb; ++y)
          s += db[y] * g.coeff(x, a, y, gfun[y]);
        if (s > bx) {
          bx = s;
          ba = a;
        }
      }
      fbuf[x] = ba;
      v += da[x] * bx;
    }
    if (v > best) {
      best = v;
      if (f_out || g_out) {
        best_f = fbuf;
        best_g = gfun;
      }
    }
    for (std::size_t y = nb; y-- > 0;) {
      if (++gfun[y] < mb) break;
      gfun[y] = 0;
    }
  }
  if (f_out) *f_out = std::move(best_f);
  if (g_out) *g_out = std::move(best_g);
  return best;
}

// The weight LP shared by the bound solver and the ascent oracle.
// Variables are nonnegative weights over symbol pairs plus one surplus
// slack per kept budget row.  Rows: total mass 1; one row per joint
// setting cell (x,y) except (0,0), pinning the observed joint statistics
// to the product p(x)p(y) (the skipped cell follows from the total); and
// the min-entropy budget rows  sum_w nu >= (1 - xi) H  written with
// surplus slacks.
//
// Two budget extremes are presolved away because they make the feasible
// set live entirely on the budget hyperplane and the simplex grind
// through its degeneracy: a row demanding the maximum achievable
// min-entropy only admits symbols attaining that maximum (keep those
// columns, drop the row), and a row demanding nothing is vacuous (drop
// the row).
struct BudgetLpModel {
  LinearProgram lp;
  std::vector<std::size_t> active_a, active_b;  // kept atom indices per side
  bool budget_row_a = false, budget_row_b = false;
  double rhs_a = 0.0, rhs_b = 0.0;  // budget requirements, kept rows or not
};

inline BudgetLpModel assemble_budget_lp(
    const GameTable& g, const std::vector<std::vector<double>>& dists_a,
    const std::vector<double>& nu_a,
    const std::vector<std::vector<double>>& dists_b,
    const std::vector<double>& nu_b, const std::vector<double>& values,
    const KnowledgeBudget& budget) {
  const std::size_t NA = g.n_settings_a(), NB = g.n_settings_b();
  BudgetLpModel model;
  model.rhs_a = (1.0 - budget.xi_x) * budget.entropy_x;
  model.rhs_b = (1.0 - budget.xi_y) * budget.entropy_y;

  auto presolve_side = [](const std::vector<double>& nu, double rhs,
                          std::vector<std::size_t>& active, bool& keep_row) {
    const double nu_max = *std::max_element(nu.begin(), nu.end());
    if (rhs >= nu_max - 1e-12) {
      // only maximal-entropy symbols can appear
      for (std::size_t i = 0; i < nu.size(); ++i)
        if (nu[i] >= rhs - 1e-12) active.push_back(i);
      keep_row = false;
    } else {
      active.resize(nu.size());
      for (std::size_t i = 0; i < nu.size(); ++i) active[i] = i;
      keep_row = rhs > 1e-12;  // a zero requirement holds vacuously
    }
  };
  presolve_side(nu_a, model.rhs_a, model.active_a, model.budget_row_a);
  presolve_side(nu_b, model.rhs_b, model.active_b, model.budget_row_b);

  const std::size_t ca = model.active_a.size(), cb = model.active_b.size();
  const std::size_t slacks =
      (model.budget_row_a ? 1 : 0) + (model.budget_row_b ? 1 : 0);
  const std::size_t R = NA * NB + slacks;
  const std::size_t C = ca * cb + slacks;
  const std::size_t row_budget_a = NA * NB;
  const std::size_t row_budget_b = NA * NB + (model.budget_row_a ? 1 : 0);

  LinearProgram& lp = model.lp;
  lp.num_rows = R;
  lp.num_cols = C;
  lp.matrix.assign(R * C, 0.0);
  lp.rhs.assign(R, 0.0);
  lp.objective.assign(C, 0.0);

  for (std::size_t ai = 0; ai < ca; ++ai)
    for (std::size_t bi = 0; bi < cb; ++bi) {
      const std::size_t i = model.active_a[ai], j = model.active_b[bi];
      const std::size_t col = ai * cb + bi;
      double* entry = &lp.matrix[col * R];
      entry[0] = 1.0;
      for (std::size_t x = 0; x < NA; ++x)
        for (std::size_t y = 0; y < NB; ++y) {
          if (x == 0 && y == 0) continue;
          entry[x * NB + y] = dists_a[i][x] * dists_b[j][y];
        }
      if (model.budget_row_a) entry[row_budget_a] = nu_a[i];
      if (model.budget_row_b) entry[row_budget_b] = nu_b[j];
      lp.objective[col] = values[i * dists_b.size() + j];
    }
  {
    std::size_t slack_col = ca * cb;
    if (model.budget_row_a)
      lp.matrix[slack_col++ * R + row_budget_a] = -1.0;
    if (model.budget_row_b) lp.matrix[slack_col * R + row_budget_b] = -1.0;
  }

  lp.rhs[0] = 1.0;
  for (std::size_t x = 0; x < NA; ++x)
    for (std::size_t y = 0; y < NB; ++y) {
      if (x == 0 && y == 0) continue;
      lp.rhs[x * NB + y] = g.marginal_a(x) * g.marginal_b(y);
    }
  if (model.budget_row_a) lp.rhs[row_budget_a] = model.rhs_a;
  if (model.budget_row_b) lp.rhs[row_budget_b] = model.rhs_b;
  return model;
}

inline void check_budget_against_game(const GameTable& g,
                                      const KnowledgeBudget& budget) {
  if (!(budget.xi_x >= 0.0 && budget.xi_x <= 1.0) ||
      !(budget.xi_y >= 0.0 && budget.xi_y <= 1.0))
    throw ValidationError("knowledge budget: xi values must lie in [0, 1]");
  if (std::abs(budget.entropy_x - min_entropy(g.marginals_a())) >
          kAggregateTol ||
      std::abs(budget.entropy_y - min_entropy(g.marginals_b())) >
          kAggregateTol)
    throw ValidationError(
        "knowledge budget: reference entropies do not match the game's "
        "setting marginals");
}

}  // namespace detail

inline ExpandedAlphabet build_expanded_alphabet(const GameTable& g, Party party,
                                                std::size_t heights) {
  const std::size_t n =
      party == Party::A ? g.n_settings_a() : g.n_settings_b();
  const std::size_t m =
      party == Party::A ? g.n_outcomes_a() : g.n_outcomes_b();
  auto family = detail::two_level_family(n, heights);
  const std::uint64_t responses =
      detail::checked_pow(m, n, kDefaultEnumerationCap);
  if (responses > kDefaultEnumerationCap)
    throw CapacityError("expanded alphabet would exceed the enumeration cap");
  ExpandedAlphabet alphabet;
  alphabet.atoms.reserve(static_cast<std::size_t>(responses) * family.size());
  std::vector<std::size_t> f;
  for (std::uint64_t ri = 0; ri < responses; ++ri) {
    detail::decode_response(ri, n, m, f);
    for (const auto& d : family)
      alphabet.atoms.push_back({f, d, std::log2(d.peak_prob)});
  }
  alphabet.settings_family = std::move(family);
  return alphabet;
}

struct SolveDiagnostics {
  std::uint64_t lp_pivots = 0;
  std::uint64_t iterations = 0;  // ascent iterations; 0 for the pure LP path
  std::size_t lp_rows = 0;
  std::size_t lp_cols = 0;
  std::size_t support_size = 0;
  double feasibility_residual = 0.0;
  bool budget_a_tight = false;
  bool budget_b_tight = false;
  // Set when the game's marginals are not uniform: the discretized family
  // is only guaranteed exhaustive for uniform settings, so treat the
  // bound as best-effort there.
  bool general_marginals = false;
};

struct BoundResult {
  double value = 0.0;
  EveStrategy witness;
  KnowledgeBudget budget;
  SolveDiagnostics diagnostics;
};

// Knowledge-dependent local bound by linear programming.
//
// Eve's optimal strategies decompose over a hidden alphabet whose symbols
// pair a deterministic response with a setting distribution; for uniform
// marginals the two-level family with peaks on the height grid realizes
// every optimum.  Columns that share a pair of setting rows differ only
// in their responses, so each (row_A, row_B) pair enters the LP once with
// the best deterministic responses folded into its objective
// coefficient; responses are recovered when the witness is assembled.
// Construction precomputes that value table once, so one instance can
// solve many budgets.
class AdversarialBoundSolver {
 public:
  explicit AdversarialBoundSolver(GameTable game,
                                  std::size_t heights = kDefaultHeights)
      : game_(std::move(game)), heights_(heights) {
    auto family_a = detail::two_level_family(game_.n_settings_a(), heights);
    auto family_b = detail::two_level_family(game_.n_settings_b(), heights);
    for (const auto& d : family_a) {
      dists_a_.push_back(d.to_vector());
      nu_a_.push_back(d.min_entropy_bits());
    }
    for (const auto& d : family_b) {
      dists_b_.push_back(d.to_vector());
      nu_b_.push_back(d.min_entropy_bits());
    }
    if (!game_.uniform_marginals()) {
      // Keep the mixture constraint satisfiable for every budget by
      // offering the reference marginal itself as a row on each side.
      general_marginals_ = true;
      dists_a_.push_back(game_.marginals_a());
      nu_a_.push_back(min_entropy(game_.marginals_a()));
      dists_b_.push_back(game_.marginals_b());
      nu_b_.push_back(min_entropy(game_.marginals_b()));
    }
    value_.resize(dists_a_.size() * dists_b_.size());
    for (std::size_t i = 0; i < dists_a_.size(); ++i)
      for (std::size_t j = 0; j < dists_b_.size(); ++j)
        value_[i * dists_b_.size() + j] = detail::best_response_value(
            game_, dists_a_[i], dists_b_[j], nullptr, nullptr);
  }

  const GameTable& game() const { return game_; }
  std::size_t heights() const { return heights_; }

  BoundResult solve(const KnowledgeBudget& budget) const {
    detail::check_budget_against_game(game_, budget);
    const detail::BudgetLpModel model = detail::assemble_budget_lp(
        game_, dists_a_, nu_a_, dists_b_, nu_b_, value_, budget);
    const LinearProgram& lp = model.lp;
    const LpSolution sol = lp_solve(lp);

    BoundResult res;
    res.value = sol.optimum;
    res.budget = budget;
    res.diagnostics.lp_pivots = sol.pivots;
    res.diagnostics.lp_rows = lp.num_rows;
    res.diagnostics.lp_cols = lp.num_cols;
    res.diagnostics.feasibility_residual = sol.feasibility_residual;
    res.diagnostics.general_marginals = general_marginals_;

    // Witness: expand each supported column back into (settings row,
    // response) symbols per side, merging repeats.
    const std::size_t cb = model.active_b.size();
    const std::size_t structural = model.active_a.size() * cb;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> keys_a,
        keys_b;
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> cells;
    double nu_mass_a = 0.0, nu_mass_b = 0.0, total = 0.0;
    auto intern = [](std::vector<std::pair<std::size_t,
                                           std::vector<std::size_t>>>& keys,
                     std::size_t dist_id,
                     const std::vector<std::size_t>& response) {
      for (std::size_t k = 0; k < keys.size(); ++k)
        if (keys[k].first == dist_id && keys[k].second == response) return k;
      keys.emplace_back(dist_id, response);
      return keys.size() - 1;
    };
    for (const auto& [col, w] : sol.support) {
      if (col >= structural) continue;  // budget slacks
      const std::size_t i = model.active_a[col / cb];
      const std::size_t j = model.active_b[col % cb];
      std::vector<std::size_t> f, gfun;
      detail::best_response_value(game_, dists_a_[i], dists_b_[j], &f, &gfun);
      const std::size_t l1 = intern(keys_a, i, f);
      const std::size_t l2 = intern(keys_b, j, gfun);
      cells.push_back({{l1, l2}, w});
      nu_mass_a += w * nu_a_[i];
      nu_mass_b += w * nu_b_[j];
      total += w;
    }
    res.diagnostics.support_size = cells.size();
    res.diagnostics.budget_a_tight =
        std::abs(nu_mass_a - model.rhs_a) <= kAggregateTol;
    res.diagnostics.budget_b_tight =
        std::abs(nu_mass_b - model.rhs_b) <= kAggregateTol;

    EveStrategy w;
    w.joint_weights.assign(keys_a.size(),
                           std::vector<double>(keys_b.size(), 0.0));
    for (const auto& [cell, weight] : cells)
      w.joint_weights[cell.first][cell.second] += weight / total;
    for (const auto& [dist_id, f] : keys_a) {
      w.settings_a.push_back(dists_a_[dist_id]);
      std::vector<std::vector<double>> table(
          game_.n_settings_a(), std::vector<double>(game_.n_outcomes_a(), 0.0));
      for (std::size_t x = 0; x < game_.n_settings_a(); ++x)
        table[x][f[x]] = 1.0;
      w.response_a.push_back(std::move(table));
    }
    for (const auto& [dist_id, gfun] : keys_b) {
      w.settings_b.push_back(dists_b_[dist_id]);
      std::vector<std::vector<double>> table(
          game_.n_settings_b(), std::vector<double>(game_.n_outcomes_b(), 0.0));
      for (std::size_t y = 0; y < game_.n_settings_b(); ++y)
        table[y][gfun[y]] = 1.0;
      w.response_b.push_back(std::move(table));
    }
    try {
      validate_strategy(game_, w);
    } catch (const InputError& e) {
      throw SolverError(std::string("internal witness assembly failed: ") +
                        e.what());
    }
    res.witness = std::move(w);
    return res;
  }

 private:
  GameTable game_;
  std::size_t heights_;
  bool general_marginals_ = false;
  std::vector<std::vector<double>> dists_a_, dists_b_;
  std::vector<double> nu_a_, nu_b_;
  std::vector<double> value_;
};

inline BoundResult solve_adversarial_bound(const GameTable& g,
                                           const KnowledgeBudget& budget,
                                           std::size_t heights = kDefaultHeights) {
  return AdversarialBoundSolver(g, heights).solve(budget);
}

// Exact bounds at the three full-knowledge corners, for uniform setting
// marginals.  Knowing a party's setting lets the responses on that side,
// and anything correlated with it on the other side, adapt per setting;
// the optimum is reached on deterministic choices and the sums collapse.
inline double closed_form_full_knowledge(const GameTable& g,
                                         KnowledgeSide side) {
  if (!g.uniform_marginals())
    throw InputError(
        "closed-form full-knowledge bounds require uniform setting marginals");
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  const double norm = 1.0 / (static_cast<double>(na) * static_cast<double>(nb));
  double total = 0.0;
  switch (side) {
    case KnowledgeSide::A:
      // Eve knows x: per x the pair (a, g) adapts freely, and per y the
      // best b is independent of the rest once a is fixed.
      for (std::size_t x = 0; x < na; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < ma; ++a) {
          double s = 0.0;
          for (std::size_t y = 0; y < nb; ++y) {
            double m = g.coeff(x, a, y, 0);
            for (std::size_t b = 1; b < mb; ++b)
              m = std::max(m, g.coeff(x, a, y, b));
            s += m;
          }
          best = std::max(best, s);
        }
        total += best;
      }
      return norm * total;
    case KnowledgeSide::B:
      for (std::size_t y = 0; y < nb; ++y) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < mb; ++b) {
          double s = 0.0;
          for (std::size_t x = 0; x < na; ++x) {
            double m = g.coeff(x, 0, y, b);
            for (std::size_t a = 1; a < ma; ++a)
              m = std::max(m, g.coeff(x, a, y, b));
            s += m;
          }
          best = std::max(best, s);
        }
        total += best;
      }
      return norm * total;
    case KnowledgeSide::Both:
      return algebraic_max(g);
  }
  throw ValidationError("unknown knowledge side");
}

// Independent lower bound on the same quantity by coordinate ascent over
// explicit strategies: alternate greedy deterministic responses, a
// projected gradient step on the setting rows (with a blend back toward
// the reference whenever the entropy budget is overdrawn), and the exact
// weight LP over the current symbols.  Each side keeps one pinned
// reference row so the weight LP always has a feasible point.  Restart 0
// starts from the classical optimum; restarts 1-3 start from
// setting-revealing rows on either or both sides; later restarts are
// seeded randomly.  Deterministic for fixed (restarts, seed).
inline BoundResult coordinate_ascent_oracle(const GameTable& g,
                                            const KnowledgeBudget& budget,
                                            std::size_t restarts,
                                            std::uint64_t seed) {
  detail::check_budget_against_game(g, budget);
  if (restarts == 0)
    throw ValidationError("coordinate ascent needs at least one restart");
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  const std::size_t L1 = na + 1, L2 = nb + 1;
  const CounterRng rng(seed);

  DeterministicStrategy classical;
  classical.alice_response.assign(na, 0);
  classical.bob_response.assign(nb, 0);
  try {
    classical = classical_bound(g).witness;
  } catch (const CapacityError&) {
    // keep the all-zero responses; greedy sweeps will adapt them
  }

  const double need_a = (1.0 - budget.xi_x) * budget.entropy_x;
  const double need_b = (1.0 - budget.xi_y) * budget.entropy_y;
  auto nu_of = [](const std::vector<double>& row) {
    return -std::log2(*std::max_element(row.begin(), row.end())) + 0.0;
  };
  auto project_simplex = [](std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    std::size_t rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      cum += u[i];
      const double t = (cum - 1.0) / static_cast<double>(i + 1);
      if (u[i] - t > 0.0) {
        rho = i;
        tau = t;
      }
    }
    (void)rho;
    for (double& x : v) x = std::max(0.0, x - tau);
  };

  double best_value = -std::numeric_limits<double>::infinity();
  EveStrategy best_strategy;
  SolveDiagnostics best_diag, diag_accum;
  std::uint64_t total_pivots = 0, total_iters = 0;
  bool have_best = false;

  for (std::size_t r = 0; r < restarts; ++r) {
    // --- initialize rows and responses ---
    std::vector<std::vector<double>> rows_a(L1, g.marginals_a());
    std::vector<std::vector<double>> rows_b(L2, g.marginals_b());
    auto delta_rows = [](std::vector<std::vector<double>>& rows,
                         std::size_t n) {
      for (std::size_t l = 1; l < rows.size(); ++l) {
        rows[l].assign(n, 0.0);
        rows[l][(l - 1) % n] = 1.0;
      }
    };
    if ((r == 1 || r == 3) && budget.xi_x > 0.0) delta_rows(rows_a, na);
    if ((r == 2 || r == 3) && budget.xi_y > 0.0) delta_rows(rows_b, nb);
    if (r >= 4) {
      auto random_row = [&](std::uint64_t stream_id, std::size_t n) {
        std::vector<double> row(n);
        double sum = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
          const double u = rng.uniform(stream_id, x);
          row[x] = -std::log(std::max(1e-12, 1.0 - u));
          sum += row[x];
        }
        const double sharpen =
            1.0 + 3.0 * rng.uniform(stream_id, n);
        double norm = 0.0;
        for (double& v : row) {
          v = std::pow(v / sum, sharpen);
          norm += v;
        }
        for (double& v : row) v /= norm;
        return row;
      };
      if (budget.xi_x > 0.0)
        for (std::size_t l = 1; l < L1; ++l)
          rows_a[l] = random_row(r * 7919 + 11 * l, na);
      if (budget.xi_y > 0.0)
        for (std::size_t l = 1; l < L2; ++l)
          rows_b[l] = random_row(r * 7919 + 1000 + 11 * l, nb);
    }

    std::vector<std::vector<std::size_t>> resp_a(L1, classical.alice_response);
    std::vector<std::vector<std::size_t>> resp_b(L2, classical.bob_response);
    if (r >= 4) {
      for (std::size_t l = 0; l < L1; ++l)
        for (std::size_t x = 0; x < na; ++x)
          resp_a[l][x] = std::min<std::size_t>(
              ma - 1, static_cast<std::size_t>(
                          rng.uniform(r * 104729 + 13 * l, x) *
                          static_cast<double>(ma)));
      for (std::size_t l = 0; l < L2; ++l)
        for (std::size_t y = 0; y < nb; ++y)
          resp_b[l][y] = std::min<std::size_t>(
              mb - 1, static_cast<std::size_t>(
                          rng.uniform(r * 104729 + 2000 + 13 * l, y) *
                          static_cast<double>(mb)));
    }

    // Structured restarts pair each revealing row with its own symbol on
    // the other side, so the greedy responses can adapt per setting; a
    // product or uniform pairing would average the settings out and stall
    // at the classical value.
    std::vector<double> w(L1 * L2, 0.0);
    if (r == 1) {
      for (std::size_t x = 0; x < na; ++x)
        w[(1 + x) * L2 + 1 + x % (L2 - 1)] += g.marginal_a(x);
    } else if (r == 2) {
      for (std::size_t y = 0; y < nb; ++y)
        w[(1 + y % (L1 - 1)) * L2 + 1 + y] += g.marginal_b(y);
    } else if (r == 3) {
      for (std::size_t x = 0; x < na; ++x)
        for (std::size_t y = 0; y < nb; ++y)
          w[(1 + x) * L2 + 1 + y] = g.marginal_a(x) * g.marginal_b(y);
    } else {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(L1 * L2));
    }
    double local_best = -std::numeric_limits<double>::infinity();
    std::size_t stall = 0;

    for (std::size_t t = 0; t < 40; ++t) {
      ++total_iters;
      // greedy deterministic responses, Alice given Bob then Bob given
      // Alice
      for (std::size_t l1 = 0; l1 < L1; ++l1)
        for (std::size_t x = 0; x < na; ++x) {
          double best_s = -std::numeric_limits<double>::infinity();
          std::size_t best_a = 0;
          for (std::size_t a = 0; a < ma; ++a) {
            double s = 0.0;
            for (std::size_t l2 = 0; l2 < L2; ++l2) {
              const double ww = w[l1 * L2 + l2];
              if (ww == 0.0) continue;
              for (std::size_t y = 0; y < nb; ++y)
                s += ww * rows_b[l2][y] * g.coeff(x, a, y, resp_b[l2][y]);
            }
            if (s > best_s) {
              best_s = s;
              best_a = a;
            }
          }
          resp_a[l1][x] = best_a;
        }
      for (std::size_t l2 = 0; l2 < L2; ++l2)
        for (std::size_t y = 0; y < nb; ++y) {
          double best_s = -std::numeric_limits<double>::infinity();
          std::size_t best_b = 0;
          for (std::size_t b = 0; b < mb; ++b) {
            double s = 0.0;
            for (std::size_t l1 = 0; l1 < L1; ++l1) {
              const double ww = w[l1 * L2 + l2];
              if (ww == 0.0) continue;
              for (std::size_t x = 0; x < na; ++x)
                s += ww * rows_a[l1][x] * g.coeff(x, resp_a[l1][x], y, b);
            }
            if (s > best_s) {
              best_s = s;
              best_b = b;
            }
          }
          resp_b[l2][y] = best_b;
        }

      // exact weight LP over the current symbols; the pinned reference
      // rows keep the LP feasible at any budget, so sharp rows never need
      // to be blended back -- the LP just caps their weight
      std::vector<double> nu_a(L1), nu_b(L2), values(L1 * L2);
      for (std::size_t l1 = 0; l1 < L1; ++l1) nu_a[l1] = nu_of(rows_a[l1]);
      for (std::size_t l2 = 0; l2 < L2; ++l2) nu_b[l2] = nu_of(rows_b[l2]);
      for (std::size_t l1 = 0; l1 < L1; ++l1)
        for (std::size_t l2 = 0; l2 < L2; ++l2) {
          double v = 0.0;
          for (std::size_t x = 0; x < na; ++x)
            for (std::size_t y = 0; y < nb; ++y)
              v += rows_a[l1][x] * rows_b[l2][y] *
                   g.coeff(x, resp_a[l1][x], y, resp_b[l2][y]);
          values[l1 * L2 + l2] = v;
        }
      const detail::BudgetLpModel model = detail::assemble_budget_lp(
          g, rows_a, nu_a, rows_b, nu_b, values, budget);
      LpSolution sol;
      try {
        sol = lp_solve(model.lp);
      } catch (const SolverError&) {
        // gradient steps can drive rows nearly dependent and the weight
        // LP numerically singular; the restart just ends on its best
        break;
      }
      total_pivots += sol.pivots;
      std::fill(w.begin(), w.end(), 0.0);
      double total = 0.0;
      const std::size_t cb = model.active_b.size();
      const std::size_t structural = model.active_a.size() * cb;
      std::size_t structural_support = 0;
      for (const auto& [col, weight] : sol.support) {
        if (col >= structural) continue;
        const std::size_t l1 = model.active_a[col / cb];
        const std::size_t l2 = model.active_b[col % cb];
        w[l1 * L2 + l2] += weight;
        total += weight;
        ++structural_support;
      }
      for (double& v : w) v /= total;

      if (sol.optimum > best_value) {
        best_value = sol.optimum;
        EveStrategy e;
        e.joint_weights.assign(L1, std::vector<double>(L2, 0.0));
        for (std::size_t l1 = 0; l1 < L1; ++l1)
          for (std::size_t l2 = 0; l2 < L2; ++l2)
            e.joint_weights[l1][l2] = w[l1 * L2 + l2];
        e.settings_a = rows_a;
        e.settings_b = rows_b;
        for (std::size_t l1 = 0; l1 < L1; ++l1) {
          std::vector<std::vector<double>> table(
              na, std::vector<double>(ma, 0.0));
          for (std::size_t x = 0; x < na; ++x) table[x][resp_a[l1][x]] = 1.0;
          e.response_a.push_back(std::move(table));
        }
        for (std::size_t l2 = 0; l2 < L2; ++l2) {
          std::vector<std::vector<double>> table(
              nb, std::vector<double>(mb, 0.0));
          for (std::size_t y = 0; y < nb; ++y) table[y][resp_b[l2][y]] = 1.0;
          e.response_b.push_back(std::move(table));
        }
        best_strategy = std::move(e);
        have_best = true;
        best_diag.support_size = structural_support;
        best_diag.feasibility_residual = sol.feasibility_residual;
        double nu_mass_a = 0.0, nu_mass_b = 0.0;
        for (std::size_t l1 = 0; l1 < L1; ++l1)
          for (std::size_t l2 = 0; l2 < L2; ++l2) {
            nu_mass_a += w[l1 * L2 + l2] * nu_a[l1];
            nu_mass_b += w[l1 * L2 + l2] * nu_b[l2];
          }
        best_diag.budget_a_tight = std::abs(nu_mass_a - need_a) <= kAggregateTol;
        best_diag.budget_b_tight = std::abs(nu_mass_b - need_b) <= kAggregateTol;
        best_diag.lp_rows = model.lp.num_rows;
        best_diag.lp_cols = model.lp.num_cols;
      }
      if (sol.optimum > local_best + 1e-10) {
        local_best = sol.optimum;
        stall = 0;
      } else if (++stall >= 5) {
        break;
      }

      // projected gradient step on every non-pinned row, preparing the
      // next iteration's symbols; the current ones were already scored, so
      // a bad move can only cost future progress, never the recorded best.
      // A side with zero knowledge stays at the reference -- only rows at
      // full entropy can carry weight there, and the reference is the one
      // such row.
      const double eta = 0.5 / (1.0 + 0.15 * static_cast<double>(t));
      for (std::size_t l1 = budget.xi_x > 0.0 ? 1 : L1; l1 < L1; ++l1) {
        std::vector<double> grad(na, 0.0);
        for (std::size_t x = 0; x < na; ++x)
          for (std::size_t l2 = 0; l2 < L2; ++l2) {
            const double ww = w[l1 * L2 + l2];
            if (ww == 0.0) continue;
            for (std::size_t y = 0; y < nb; ++y)
              grad[x] +=
                  ww * rows_b[l2][y] * g.coeff(x, resp_a[l1][x], y, resp_b[l2][y]);
          }
        double amax = 0.0;
        for (double v : grad) amax = std::max(amax, std::abs(v));
        if (amax < 1e-15) continue;
        for (std::size_t x = 0; x < na; ++x)
          rows_a[l1][x] += eta * grad[x] / amax;
        project_simplex(rows_a[l1]);
      }
      for (std::size_t l2 = budget.xi_y > 0.0 ? 1 : L2; l2 < L2; ++l2) {
        std::vector<double> grad(nb, 0.0);
        for (std::size_t y = 0; y < nb; ++y)
          for (std::size_t l1 = 0; l1 < L1; ++l1) {
            const double ww = w[l1 * L2 + l2];
            if (ww == 0.0) continue;
            for (std::size_t x = 0; x < na; ++x)
              grad[y] +=
                  ww * rows_a[l1][x] * g.coeff(x, resp_a[l1][x], y, resp_b[l2][y]);
          }
        double amax = 0.0;
        for (double v : grad) amax = std::max(amax, std::abs(v));
        if (amax < 1e-15) continue;
        for (std::size_t y = 0; y < nb; ++y)
          rows_b[l2][y] += eta * grad[y] / amax;
        project_simplex(rows_b[l2]);
      }
    }
  }

  if (!have_best)
    throw SolverError("coordinate ascent failed to produce any strategy");
  BoundResult res;
  res.value = best_value;
  res.budget = budget;
  res.witness = std::move(best_strategy);
  res.diagnostics = best_diag;
  res.diagnostics.iterations = total_iters;
  res.diagnostics.lp_pivots = total_pivots;
  res.diagnostics.general_marginals = !g.uniform_marginals();
  try {
    validate_strategy(g, res.witness);
  } catch (const InputError& e) {
    throw SolverError(std::string("internal ascent witness failed: ") +
                      e.what());
  }
  return res;
}

}  // namespace bellasym
