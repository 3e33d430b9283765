#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "game.hpp"
#include "lhv.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace bellasym {

// One party's settings as Eve sees them: with probability weights[l] the
// hidden symbol is l and the party's setting is drawn from dist[l].
struct ConditionalSettings {
  std::vector<double> weights;
  std::vector<std::vector<double>> dist;
};

// Min-entropy of a distribution in bits, -log2 of the largest mass.
inline double min_entropy(const std::vector<double>& p) {
  detail::require_distribution(p, "min_entropy");
  return -std::log2(*std::max_element(p.begin(), p.end())) + 0.0;
}

inline void validate_conditional(const ConditionalSettings& c) {
  detail::require_distribution(c.weights, "conditional settings weights");
  if (c.dist.size() != c.weights.size())
    throw ShapeError("conditional settings: one distribution per symbol required");
  const std::size_t n = c.dist.empty() ? 0 : c.dist.front().size();
  for (const auto& row : c.dist) {
    if (row.size() != n)
      throw ShapeError("conditional settings: rows of unequal length");
    detail::require_distribution(row, "conditional settings row");
  }
}

// Average min-entropy of the setting given the hidden symbol,
// -sum_l w(l) log2 max_x p(x|l).
inline double conditional_min_entropy(const ConditionalSettings& c) {
  validate_conditional(c);
  double h = 0.0;
  for (std::size_t l = 0; l < c.weights.size(); ++l)
    h -= c.weights[l] *
         std::log2(*std::max_element(c.dist[l].begin(), c.dist[l].end()));
  return h + 0.0;
}

// Fraction of the setting's min-entropy removed by the hidden symbol:
// 0 = no knowledge, 1 = settings fully known.  The mixture of the rows
// must reproduce `reference`, which must carry nonzero entropy.
inline double relative_knowledge(const ConditionalSettings& c,
                                 const std::vector<double>& reference) {
  validate_conditional(c);
  detail::require_distribution(reference, "reference marginal");
  if (c.dist.front().size() != reference.size())
    throw ShapeError("relative knowledge: reference length mismatch");
  for (std::size_t x = 0; x < reference.size(); ++x) {
    double m = 0.0;
    for (std::size_t l = 0; l < c.weights.size(); ++l)
      m += c.weights[l] * c.dist[l][x];
    if (std::abs(m - reference[x]) > kAggregateTol)
      throw ValidationError(
          "relative knowledge: mixture does not reproduce the reference marginal");
  }
  const double h = min_entropy(reference);
  if (h <= 0.0)
    throw UndefinedRatioError(
        "relative knowledge undefined: reference marginal has zero min-entropy");
  double xi = (h - conditional_min_entropy(c)) / h;
  // Round-off can push the ratio a hair outside [0,1]; snap it back.
  if (xi < 0.0 && xi >= -kAggregateTol) xi = 0.0;
  if (xi > 1.0 && xi <= 1.0 + kAggregateTol) xi = 1.0;
  return xi;
}

// Eve's full strategy: a pair of hidden symbols (l1, l2) with joint
// weights, per-symbol setting distributions for each party, and
// per-symbol response tables p(a|x, l1), p(b|y, l2).  Locality lives in
// the structure: Alice's column of tables never sees l2 or y, Bob's never
// sees l1 or x.  Correlation enters only through the joint weights.
struct EveStrategy {
  std::vector<std::vector<double>> joint_weights;            // [l1][l2]
  std::vector<std::vector<double>> settings_a;               // [l1][x]
  std::vector<std::vector<double>> settings_b;               // [l2][y]
  std::vector<std::vector<std::vector<double>>> response_a;  // [l1][x][a]
  std::vector<std::vector<std::vector<double>>> response_b;  // [l2][y][b]

  std::size_t alphabet_a() const { return settings_a.size(); }
  std::size_t alphabet_b() const { return settings_b.size(); }

  std::vector<double> weights_a() const {
    std::vector<double> w(joint_weights.size(), 0.0);
    for (std::size_t l1 = 0; l1 < joint_weights.size(); ++l1)
      for (double v : joint_weights[l1]) w[l1] += v;
    return w;
  }
  std::vector<double> weights_b() const {
    if (joint_weights.empty()) return {};
    std::vector<double> w(joint_weights.front().size(), 0.0);
    for (const auto& row : joint_weights)
      for (std::size_t l2 = 0; l2 < row.size(); ++l2) w[l2] += row[l2];
    return w;
  }

  ConditionalSettings conditional_a() const { return {weights_a(), settings_a}; }
  ConditionalSettings conditional_b() const { return {weights_b(), settings_b}; }

  // A single deterministic strategy as a blind Eve: singleton alphabets,
  // settings equal to the game marginals, zero knowledge on both sides.
  static EveStrategy from_deterministic(const GameTable& g,
                                        const DeterministicStrategy& s) {
    if (s.alice_response.size() != g.n_settings_a() ||
        s.bob_response.size() != g.n_settings_b())
      throw ShapeError("strategy does not match the game's setting counts");
    EveStrategy e;
    e.joint_weights = {{1.0}};
    e.settings_a = {g.marginals_a()};
    e.settings_b = {g.marginals_b()};
    e.response_a.resize(1);
    e.response_b.resize(1);
    e.response_a[0].assign(g.n_settings_a(),
                           std::vector<double>(g.n_outcomes_a(), 0.0));
    e.response_b[0].assign(g.n_settings_b(),
                           std::vector<double>(g.n_outcomes_b(), 0.0));
    for (std::size_t x = 0; x < g.n_settings_a(); ++x) {
      if (s.alice_response[x] >= g.n_outcomes_a())
        throw RangeError("strategy outcome out of range for party A");
      e.response_a[0][x][s.alice_response[x]] = 1.0;
    }
    for (std::size_t y = 0; y < g.n_settings_b(); ++y) {
      if (s.bob_response[y] >= g.n_outcomes_b())
        throw RangeError("strategy outcome out of range for party B");
      e.response_b[0][y][s.bob_response[y]] = 1.0;
    }
    return e;
  }
};

// Full structural and probabilistic check of a strategy against a game:
// shapes, normalization of every table, and the requirement that the
// weighted settings mixture on each side reproduces the game marginal.
inline void validate_strategy(const GameTable& g, const EveStrategy& e) {
  const std::size_t l1n = e.alphabet_a(), l2n = e.alphabet_b();
  if (l1n == 0 || l2n == 0)
    throw ValidationError("strategy: empty hidden alphabet");
  if (e.joint_weights.size() != l1n)
    throw ShapeError("strategy: joint weights rows != alphabet A size");
  double wsum = 0.0;
  for (const auto& row : e.joint_weights) {
    if (row.size() != l2n)
      throw ShapeError("strategy: joint weights cols != alphabet B size");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("strategy: joint weights must be nonnegative");
      wsum += v;
    }
  }
  if (std::abs(wsum - 1.0) > kProbTol)
    throw ValidationError("strategy: joint weights sum to " +
                          detail::format_double(wsum) + ", expected 1");

  auto check_side = [&](const std::vector<std::vector<double>>& settings,
                        const std::vector<std::vector<std::vector<double>>>& resp,
                        const std::vector<double>& weights,
                        const std::vector<double>& marginal, std::size_t n,
                        std::size_t m, const std::string& party) {
    if (resp.size() != settings.size())
      throw ShapeError("strategy: response tables " + party +
                       " != alphabet size");
    for (const auto& row : settings) {
      if (row.size() != n)
        throw ShapeError("strategy: settings row " + party +
                         " has wrong length");
      detail::require_distribution(row, "strategy settings " + party);
    }
    for (const auto& table : resp) {
      if (table.size() != n)
        throw ShapeError("strategy: response table " + party +
                         " has wrong setting count");
      for (const auto& row : table) {
        if (row.size() != m)
          throw ShapeError("strategy: response row " + party +
                           " has wrong outcome count");
        detail::require_distribution(row, "strategy response " + party);
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      double mix = 0.0;
      for (std::size_t l = 0; l < settings.size(); ++l)
        mix += weights[l] * settings[l][x];
      if (std::abs(mix - marginal[x]) > kAggregateTol)
        throw ValidationError("strategy: settings mixture for party " + party +
                              " does not reproduce the game marginal");
    }
  };
  check_side(e.settings_a, e.response_a, e.weights_a(), g.marginals_a(),
             g.n_settings_a(), g.n_outcomes_a(), "A");
  check_side(e.settings_b, e.response_b, e.weights_b(), g.marginals_b(),
             g.n_settings_b(), g.n_outcomes_b(), "B");
}

// Expected score of Eve's strategy: settings drawn per symbol, responses
// local to each side.
inline double evaluate_eve_value(const GameTable& g, const EveStrategy& e) {
  validate_strategy(g, e);
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  double total = 0.0;
  for (std::size_t l1 = 0; l1 < e.alphabet_a(); ++l1)
    for (std::size_t l2 = 0; l2 < e.alphabet_b(); ++l2) {
      const double w = e.joint_weights[l1][l2];
      if (w == 0.0) continue;
      double s = 0.0;
      for (std::size_t x = 0; x < na; ++x) {
        const double px = e.settings_a[l1][x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < nb; ++y) {
          const double py = e.settings_b[l2][y];
          if (py == 0.0) continue;
          double t = 0.0;
          for (std::size_t a = 0; a < ma; ++a) {
            const double ra = e.response_a[l1][x][a];
            if (ra == 0.0) continue;
            for (std::size_t b = 0; b < mb; ++b)
              t += ra * e.response_b[l2][y][b] * g.coeff(x, a, y, b);
          }
          s += px * py * t;
        }
      }
      total += w * s;
    }
  return total;
}

// The behaviour an outside observer reconstructs from Eve's strategy by
// conditioning on the settings:
//   p(ab|xy) = sum_{l1,l2} w(l1,l2) p(x|l1) p(y|l2) p(a|x,l1) p(b|y,l2)
//              / (p(x) p(y)).
// Requires strictly positive game marginals.  The strategy's joint
// setting statistics must match the product p(x) p(y); each (x,y) slice
// is renormalized by its own sum to clear round-off before the exact
// box check.
inline Box effective_box(const GameTable& g, const EveStrategy& e) {
  validate_strategy(g, e);
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  for (double v : g.marginals_a())
    if (v <= 0.0)
      throw DomainError("effective box: zero setting marginal for party A");
  for (double v : g.marginals_b())
    if (v <= 0.0)
      throw DomainError("effective box: zero setting marginal for party B");

  std::vector<double> p(ma * mb * na * nb, 0.0);
  for (std::size_t l1 = 0; l1 < e.alphabet_a(); ++l1)
    for (std::size_t l2 = 0; l2 < e.alphabet_b(); ++l2) {
      const double w = e.joint_weights[l1][l2];
      if (w == 0.0) continue;
      for (std::size_t x = 0; x < na; ++x)
        for (std::size_t y = 0; y < nb; ++y) {
          const double base = w * e.settings_a[l1][x] * e.settings_b[l2][y];
          if (base == 0.0) continue;
          for (std::size_t a = 0; a < ma; ++a)
            for (std::size_t b = 0; b < mb; ++b)
              p[((a * mb + b) * na + x) * nb + y] +=
                  base * e.response_a[l1][x][a] * e.response_b[l2][y][b];
        }
    }
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      const double ref = g.marginal_a(x) * g.marginal_b(y);
      double s = 0.0;
      for (std::size_t a = 0; a < ma; ++a)
        for (std::size_t b = 0; b < mb; ++b)
          s += p[((a * mb + b) * na + x) * nb + y];
      if (std::abs(s / ref - 1.0) > 1e-7)
        throw DomainError(
            "effective box: joint setting statistics are not the product of "
            "the game marginals");
      for (std::size_t a = 0; a < ma; ++a)
        for (std::size_t b = 0; b < mb; ++b)
          p[((a * mb + b) * na + x) * nb + y] /= s;
    }
  return Box(ma, mb, na, nb, std::move(p));
}

// Entropy budgets for one solve: how much relative knowledge Eve may hold
// about each side, plus the reference min-entropies it is measured against.
struct KnowledgeBudget {
  double xi_x = 0.0;
  double xi_y = 0.0;
  double entropy_x = 0.0;  // min-entropy of the A setting marginal, bits
  double entropy_y = 0.0;

  static KnowledgeBudget for_game(const GameTable& g, double xi_x,
                                  double xi_y) {
    if (!(xi_x >= 0.0 && xi_x <= 1.0) || !(xi_y >= 0.0 && xi_y <= 1.0))
      throw ValidationError("knowledge budget: xi values must lie in [0, 1]");
    return {xi_x, xi_y, min_entropy(g.marginals_a()),
            min_entropy(g.marginals_b())};
  }
};

struct SimulationReport {
  double empirical_value = 0.0;
  double stderr_value = 0.0;  // sample standard error of the mean
  std::vector<double> setting_freq_a;
  std::vector<double> setting_freq_b;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo run of a strategy.  Shot i draws, in order, the symbol
// pair, x, y, a, b from counters 0..4 of stream i, so the report is a
// pure function of (strategy, shots, seed) regardless of scheduling.
inline SimulationReport simulate(const GameTable& g, const EveStrategy& e,
                                 std::uint64_t shots, std::uint64_t seed) {
  validate_strategy(g, e);
  if (shots == 0) throw ValidationError("simulate: shots must be >= 1");
  const std::size_t l2n = e.alphabet_b();
  std::vector<double> joint(e.alphabet_a() * l2n);
  for (std::size_t l1 = 0; l1 < e.alphabet_a(); ++l1)
    for (std::size_t l2 = 0; l2 < l2n; ++l2)
      joint[l1 * l2n + l2] = e.joint_weights[l1][l2];

  CounterRng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  std::vector<std::uint64_t> ca(g.n_settings_a(), 0), cb(g.n_settings_b(), 0);
  for (std::uint64_t i = 0; i < shots; ++i) {
    const std::size_t pair = CounterRng::pick(joint, rng.uniform(i, 0));
    const std::size_t l1 = pair / l2n, l2 = pair % l2n;
    const std::size_t x = CounterRng::pick(e.settings_a[l1], rng.uniform(i, 1));
    const std::size_t y = CounterRng::pick(e.settings_b[l2], rng.uniform(i, 2));
    const std::size_t a =
        CounterRng::pick(e.response_a[l1][x], rng.uniform(i, 3));
    const std::size_t b =
        CounterRng::pick(e.response_b[l2][y], rng.uniform(i, 4));
    const double v = g.coeff(x, a, y, b);
    sum += v;
    sumsq += v * v;
    ++ca[x];
    ++cb[y];
  }
  SimulationReport rep;
  rep.shots = shots;
  rep.seed = seed;
  const double n = static_cast<double>(shots);
  rep.empirical_value = sum / n;
  if (shots >= 2) {
    const double var =
        std::max(0.0, (sumsq - n * rep.empirical_value * rep.empirical_value) /
                          (n - 1.0));
    rep.stderr_value = std::sqrt(var / n);
  }
  rep.setting_freq_a.resize(ca.size());
  rep.setting_freq_b.resize(cb.size());
  for (std::size_t x = 0; x < ca.size(); ++x)
    rep.setting_freq_a[x] = static_cast<double>(ca[x]) / n;
  for (std::size_t y = 0; y < cb.size(); ++y)
    rep.setting_freq_b[y] = static_cast<double>(cb[y]) / n;
  return rep;
}

// Strategy text format, mirroring the game format:
//
//   alphabet A=<n> B=<n>
//   weight <l1> <l2> <v>            omitted pairs carry weight 0
//   setdist A <l1> <p(0)> ...       one line per symbol
//   setdist B <l2> <p(0)> ...
//   response A <l1> <x> <p(a=0)> ...
//   response B <l2> <y> <p(b=0)> ...
inline std::string serialize_strategy(const EveStrategy& e) {
  std::string out;
  out += "alphabet A=" + std::to_string(e.alphabet_a()) +
         " B=" + std::to_string(e.alphabet_b()) + "\n";
  for (std::size_t l1 = 0; l1 < e.alphabet_a(); ++l1)
    for (std::size_t l2 = 0; l2 < e.alphabet_b(); ++l2) {
      const double v = e.joint_weights[l1][l2];
      if (v == 0.0) continue;
      out += "weight " + std::to_string(l1) + " " + std::to_string(l2) + " " +
             detail::format_double(v) + "\n";
    }
  auto emit_side = [&out](const std::vector<std::vector<double>>& settings,
                          const std::vector<std::vector<std::vector<double>>>&
                              resp,
                          const std::string& party) {
    for (std::size_t l = 0; l < settings.size(); ++l) {
      out += "setdist " + party + " " + std::to_string(l);
      for (double v : settings[l]) out += " " + detail::format_double(v);
      out += "\n";
    }
    for (std::size_t l = 0; l < resp.size(); ++l)
      for (std::size_t x = 0; x < resp[l].size(); ++x) {
        out += "response " + party + " " + std::to_string(l) + " " +
               std::to_string(x);
        for (double v : resp[l][x]) out += " " + detail::format_double(v);
        out += "\n";
      }
  };
  emit_side(e.settings_a, e.response_a, "A");
  emit_side(e.settings_b, e.response_b, "B");
  return out;
}

inline EveStrategy parse_strategy(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_alphabet = false;
  std::size_t l1n = 0, l2n = 0;
  EveStrategy e;
  // Row lengths are pinned by the first line of each kind.
  std::vector<bool> have_set_a, have_set_b;
  std::vector<std::vector<bool>> have_resp_a, have_resp_b;

  auto read_row = [&](std::istringstream& ls, std::vector<double>& row,
                      std::size_t expected) {
    std::vector<double> vals;
    double v;
    while (ls >> v) {
      if (!std::isfinite(v)) throw ParseError(lineno, "non-finite probability");
      vals.push_back(v);
    }
    if (!ls.eof()) throw ParseError(lineno, "malformed probability entry");
    if (vals.empty()) throw ParseError(lineno, "missing probability entries");
    if (expected != 0 && vals.size() != expected)
      throw ParseError(lineno, "expected " + std::to_string(expected) +
                                   " probability entries, got " +
                                   std::to_string(vals.size()));
    row = std::move(vals);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head[0] == '#') continue;

    if (head == "alphabet") {
      if (have_alphabet) throw ParseError(lineno, "duplicate alphabet line");
      std::string ta, tb;
      if (!(ls >> ta >> tb)) throw ParseError(lineno, "alphabet needs A=<n> B=<n>");
      l1n = detail::parse_sized(ta, 'A', lineno);
      l2n = detail::parse_sized(tb, 'B', lineno);
      if (l1n == 0 || l2n == 0)
        throw ParseError(lineno, "alphabet sizes must be >= 1");
      detail::reject_trailing(ls, lineno);
      have_alphabet = true;
      e.joint_weights.assign(l1n, std::vector<double>(l2n, 0.0));
      e.settings_a.resize(l1n);
      e.settings_b.resize(l2n);
      e.response_a.resize(l1n);
      e.response_b.resize(l2n);
      have_set_a.assign(l1n, false);
      have_set_b.assign(l2n, false);
      have_resp_a.resize(l1n);
      have_resp_b.resize(l2n);
      continue;
    }
    if (!have_alphabet)
      throw ParseError(lineno, "alphabet line must come first");

    if (head == "weight") {
      const std::size_t l1 = detail::parse_index(ls, lineno, "symbol l1");
      const std::size_t l2 = detail::parse_index(ls, lineno, "symbol l2");
      if (l1 >= l1n || l2 >= l2n)
        throw RangeError("line " + std::to_string(lineno) +
                         ": weight symbol out of alphabet range");
      const double v = detail::parse_number(ls, lineno, "weight value");
      detail::reject_trailing(ls, lineno);
      e.joint_weights[l1][l2] = v;
    } else if (head == "setdist") {
      std::string party;
      if (!(ls >> party) || (party != "A" && party != "B"))
        throw ParseError(lineno, "setdist needs party A or B");
      const bool is_a = party == "A";
      const std::size_t l = detail::parse_index(ls, lineno, "symbol");
      if (l >= (is_a ? l1n : l2n))
        throw RangeError("line " + std::to_string(lineno) +
                         ": setdist symbol out of alphabet range");
      auto& flags = is_a ? have_set_a : have_set_b;
      if (flags[l]) throw ParseError(lineno, "duplicate setdist line");
      auto& rows = is_a ? e.settings_a : e.settings_b;
      std::size_t expected = 0;
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (flags[k]) expected = rows[k].size();
      read_row(ls, rows[l], expected);
      flags[l] = true;
    } else if (head == "response") {
      std::string party;
      if (!(ls >> party) || (party != "A" && party != "B"))
        throw ParseError(lineno, "response needs party A or B");
      const bool is_a = party == "A";
      const std::size_t l = detail::parse_index(ls, lineno, "symbol");
      if (l >= (is_a ? l1n : l2n))
        throw RangeError("line " + std::to_string(lineno) +
                         ": response symbol out of alphabet range");
      const std::size_t x = detail::parse_index(ls, lineno, "setting");
      auto& tables = is_a ? e.response_a : e.response_b;
      auto& flags = is_a ? have_resp_a : have_resp_b;
      std::size_t expected = 0;
      for (const auto& table : tables)
        for (const auto& row : table)
          if (!row.empty()) expected = row.size();
      std::vector<double> row;
      read_row(ls, row, expected);
      if (tables[l].empty()) {
        // Setting count is pinned by the matching setdist line if present,
        // otherwise grows to fit.
        tables[l].resize(std::max<std::size_t>(x + 1, 1));
        flags[l].resize(tables[l].size(), false);
      }
      if (x >= tables[l].size()) {
        tables[l].resize(x + 1);
        flags[l].resize(x + 1, false);
      }
      if (flags[l][x]) throw ParseError(lineno, "duplicate response line");
      tables[l][x] = std::move(row);
      flags[l][x] = true;
    } else {
      throw ParseError(lineno, "unrecognized directive '" + head + "'");
    }
  }

  if (!have_alphabet)
    throw ValidationError("strategy file: missing alphabet line");
  for (std::size_t l = 0; l < l1n; ++l)
    if (!have_set_a[l])
      throw ValidationError("strategy file: missing setdist A " +
                            std::to_string(l));
  for (std::size_t l = 0; l < l2n; ++l)
    if (!have_set_b[l])
      throw ValidationError("strategy file: missing setdist B " +
                            std::to_string(l));
  auto finish_side = [&](std::vector<std::vector<std::vector<double>>>& tables,
                         const std::vector<std::vector<double>>& settings,
                         const std::string& party) {
    for (std::size_t l = 0; l < tables.size(); ++l) {
      if (tables[l].size() != settings[l].size())
        throw ValidationError("strategy file: response " + party + " " +
                              std::to_string(l) +
                              " does not cover every setting");
      for (std::size_t x = 0; x < tables[l].size(); ++x)
        if (tables[l][x].empty())
          throw ValidationError("strategy file: missing response " + party +
                                " " + std::to_string(l) + " " +
                                std::to_string(x));
    }
  };
  finish_side(e.response_a, e.settings_a, "A");
  finish_side(e.response_b, e.settings_b, "B");
  return e;
}

}  // namespace bellasym
