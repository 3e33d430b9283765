#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace bellasym {

// Coefficient table of a two-party game: one real pay-off per
// (x, a, y, b) tuple of settings and outcomes, plus the per-party setting
// distributions the referee draws from.  Settings are always drawn
// independently, p(x, y) = p(x) p(y); the score of a behaviour p(ab|xy)
// is the expectation of the coefficients under settings and outcomes.
//
// Text format, one directive per line ('#' starts a comment line):
//
//   settings A=<int> B=<int>
//   outcomes A=<int> B=<int>
//   marginal A <p(0)> ... <p(N_A-1)>       optional, default uniform
//   marginal B <p(0)> ... <p(N_B-1)>
//   coeff <x> <a> <y> <b> <value>          omitted entries are zero
//
// `settings` and `outcomes` must appear before any marginal or coeff
// line; duplicate coefficient entries and duplicate marginal blocks are
// rejected.
class GameTable {
 public:
  GameTable(std::size_t n_settings_a, std::size_t n_settings_b,
            std::size_t n_outcomes_a, std::size_t n_outcomes_b,
            std::vector<double> coeff, std::vector<double> marginal_a = {},
            std::vector<double> marginal_b = {})
      : na_(n_settings_a),
        nb_(n_settings_b),
        ma_(n_outcomes_a),
        mb_(n_outcomes_b),
        coeff_(std::move(coeff)),
        pa_(std::move(marginal_a)),
        pb_(std::move(marginal_b)) {
    if (na_ == 0 || nb_ == 0 || ma_ == 0 || mb_ == 0)
      throw ValidationError("game table: all setting/outcome counts must be >= 1");
    if (coeff_.size() != na_ * ma_ * nb_ * mb_)
      throw ValidationError(
          "game table: coefficient array has " + std::to_string(coeff_.size()) +
          " entries, expected " + std::to_string(na_ * ma_ * nb_ * mb_));
    for (double v : coeff_)
      if (!std::isfinite(v))
        throw ValidationError("game table: non-finite coefficient");
    if (pa_.empty()) pa_.assign(na_, 1.0 / static_cast<double>(na_));
    if (pb_.empty()) pb_.assign(nb_, 1.0 / static_cast<double>(nb_));
    if (pa_.size() != na_ || pb_.size() != nb_)
      throw ShapeError("game table: marginal length does not match setting count");
    detail::require_distribution(pa_, "marginal A");
    detail::require_distribution(pb_, "marginal B");
  }

  std::size_t n_settings_a() const { return na_; }
  std::size_t n_settings_b() const { return nb_; }
  std::size_t n_outcomes_a() const { return ma_; }
  std::size_t n_outcomes_b() const { return mb_; }

  std::size_t index(std::size_t x, std::size_t a, std::size_t y,
                    std::size_t b) const {
    return ((x * ma_ + a) * nb_ + y) * mb_ + b;
  }
  double coeff(std::size_t x, std::size_t a, std::size_t y,
               std::size_t b) const {
    return coeff_[index(x, a, y, b)];
  }
  const std::vector<double>& coefficients() const { return coeff_; }

  double marginal_a(std::size_t x) const { return pa_[x]; }
  double marginal_b(std::size_t y) const { return pb_[y]; }
  const std::vector<double>& marginals_a() const { return pa_; }
  const std::vector<double>& marginals_b() const { return pb_; }

  // True when both setting marginals equal the exact uniform values the
  // default constructor path produces.
  bool uniform_marginals() const {
    const double ua = 1.0 / static_cast<double>(na_);
    const double ub = 1.0 / static_cast<double>(nb_);
    for (double v : pa_)
      if (v != ua) return false;
    for (double v : pb_)
      if (v != ub) return false;
    return true;
  }

  friend bool operator==(const GameTable&, const GameTable&) = default;

 private:
  std::size_t na_, nb_, ma_, mb_;
  std::vector<double> coeff_;
  std::vector<double> pa_, pb_;
};

struct GameMetadata {
  std::string name;
  std::string description;
};

namespace detail {

inline std::size_t parse_sized(const std::string& tok, char party,
                               std::size_t lineno) {
  const std::string prefix = std::string(1, party) + "=";
  if (tok.rfind(prefix, 0) != 0)
    throw ParseError(lineno, "expected '" + prefix + "<count>', got '" + tok + "'");
  std::size_t value = 0;
  const char* first = tok.data() + 2;
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(lineno, "bad count in '" + tok + "'");
  return value;
}

inline double parse_number(std::istringstream& ls, std::size_t lineno,
                           const std::string& what) {
  double v = 0.0;
  if (!(ls >> v)) throw ParseError(lineno, "missing or malformed " + what);
  if (!std::isfinite(v)) throw ParseError(lineno, what + " is not finite");
  return v;
}

inline std::size_t parse_index(std::istringstream& ls, std::size_t lineno,
                               const std::string& what) {
  long long v = 0;
  if (!(ls >> v) || v < 0)
    throw ParseError(lineno, "missing or malformed " + what);
  return static_cast<std::size_t>(v);
}

inline void reject_trailing(std::istringstream& ls, std::size_t lineno) {
  std::string extra;
  if (ls >> extra)
    throw ParseError(lineno, "unexpected trailing token '" + extra + "'");
}

}  // namespace detail

inline GameTable parse_game(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;

  bool have_settings = false, have_outcomes = false;
  bool have_marg_a = false, have_marg_b = false;
  std::size_t na = 0, nb = 0, ma = 0, mb = 0;
  std::vector<double> coeff, marg_a, marg_b;
  std::vector<bool> seen;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head[0] == '#') continue;

    if (head == "settings") {
      if (have_settings) throw ParseError(lineno, "duplicate settings line");
      std::string ta, tb;
      if (!(ls >> ta >> tb)) throw ParseError(lineno, "settings needs A=<n> B=<n>");
      na = detail::parse_sized(ta, 'A', lineno);
      nb = detail::parse_sized(tb, 'B', lineno);
      if (na == 0 || nb == 0) throw ParseError(lineno, "setting counts must be >= 1");
      detail::reject_trailing(ls, lineno);
      have_settings = true;
    } else if (head == "outcomes") {
      if (have_outcomes) throw ParseError(lineno, "duplicate outcomes line");
      std::string ta, tb;
      if (!(ls >> ta >> tb)) throw ParseError(lineno, "outcomes needs A=<n> B=<n>");
      ma = detail::parse_sized(ta, 'A', lineno);
      mb = detail::parse_sized(tb, 'B', lineno);
      if (ma == 0 || mb == 0) throw ParseError(lineno, "outcome counts must be >= 1");
      detail::reject_trailing(ls, lineno);
      have_outcomes = true;
    } else if (head == "marginal") {
      if (!have_settings || !have_outcomes)
        throw ParseError(lineno, "marginal before settings/outcomes");
      std::string party;
      if (!(ls >> party) || (party != "A" && party != "B"))
        throw ParseError(lineno, "marginal needs party A or B");
      const bool is_a = party == "A";
      if ((is_a && have_marg_a) || (!is_a && have_marg_b))
        throw ParseError(lineno, "duplicate marginal " + party + " line");
      const std::size_t n = is_a ? na : nb;
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = detail::parse_number(ls, lineno, "marginal entry");
      detail::reject_trailing(ls, lineno);
      (is_a ? marg_a : marg_b) = std::move(p);
      (is_a ? have_marg_a : have_marg_b) = true;
    } else if (head == "coeff") {
      if (!have_settings || !have_outcomes)
        throw ParseError(lineno, "coeff before settings/outcomes");
      if (coeff.empty()) {
        coeff.assign(na * ma * nb * mb, 0.0);
        seen.assign(coeff.size(), false);
      }
      const std::size_t x = detail::parse_index(ls, lineno, "setting x");
      const std::size_t a = detail::parse_index(ls, lineno, "outcome a");
      const std::size_t y = detail::parse_index(ls, lineno, "setting y");
      const std::size_t b = detail::parse_index(ls, lineno, "outcome b");
      if (x >= na || y >= nb)
        throw RangeError("line " + std::to_string(lineno) +
                         ": coeff setting index out of declared range");
      if (a >= ma || b >= mb)
        throw RangeError("line " + std::to_string(lineno) +
                         ": coeff outcome index out of declared range");
      const double v = detail::parse_number(ls, lineno, "coefficient value");
      detail::reject_trailing(ls, lineno);
      const std::size_t idx = ((x * ma + a) * nb + y) * mb + b;
      if (seen[idx])
        throw ParseError(lineno, "duplicate coefficient for (" +
                                     std::to_string(x) + "," + std::to_string(a) +
                                     "," + std::to_string(y) + "," +
                                     std::to_string(b) + ")");
      seen[idx] = true;
      coeff[idx] = v;
    } else {
      throw ParseError(lineno, "unrecognized directive '" + head + "'");
    }
  }

  if (!have_settings || !have_outcomes)
    throw ValidationError("game file: missing settings or outcomes line");
  if (coeff.empty()) coeff.assign(na * ma * nb * mb, 0.0);
  return GameTable(na, nb, ma, mb, std::move(coeff), std::move(marg_a),
                   std::move(marg_b));
}

inline std::string serialize_game(const GameTable& g) {
  std::string out;
  out += "settings A=" + std::to_string(g.n_settings_a()) +
         " B=" + std::to_string(g.n_settings_b()) + "\n";
  out += "outcomes A=" + std::to_string(g.n_outcomes_a()) +
         " B=" + std::to_string(g.n_outcomes_b()) + "\n";
  const double ua = 1.0 / static_cast<double>(g.n_settings_a());
  const double ub = 1.0 / static_cast<double>(g.n_settings_b());
  const bool unif_a =
      std::all_of(g.marginals_a().begin(), g.marginals_a().end(),
                  [&](double v) { return v == ua; });
  const bool unif_b =
      std::all_of(g.marginals_b().begin(), g.marginals_b().end(),
                  [&](double v) { return v == ub; });
  if (!unif_a) {
    out += "marginal A";
    for (double v : g.marginals_a()) out += " " + detail::format_double(v);
    out += "\n";
  }
  if (!unif_b) {
    out += "marginal B";
    for (double v : g.marginals_b()) out += " " + detail::format_double(v);
    out += "\n";
  }
  for (std::size_t x = 0; x < g.n_settings_a(); ++x)
    for (std::size_t a = 0; a < g.n_outcomes_a(); ++a)
      for (std::size_t y = 0; y < g.n_settings_b(); ++y)
        for (std::size_t b = 0; b < g.n_outcomes_b(); ++b) {
          const double v = g.coeff(x, a, y, b);
          if (v == 0.0) continue;
          out += "coeff " + std::to_string(x) + " " + std::to_string(a) + " " +
                 std::to_string(y) + " " + std::to_string(b) + " " +
                 detail::format_double(v) + "\n";
        }
  return out;
}

namespace detail {

// Built-in tables, written as (y,b)-row by (x,a)-column grids with both
// axes ordered (0,0), (0,1), (1,0), (1,1), ...

// Correlation game with +/-1 pay-offs: value (-1)^(a+b+xy).
inline constexpr int kChshGrid[4][4] = {
    {1, -1, 1, -1},
    {-1, 1, -1, 1},
    {1, -1, -1, 1},
    {-1, 1, 1, -1},
};

// Four-setting two-outcome game in its nonnegative form; the fourth
// setting on each side plays the role of a marginal term.
inline constexpr int kI3322Grid[8][8] = {
    // x,a:  00 01 10 11 20 21 30 31
    {0, 0, 0, 1, 0, 0, 0, 0},  // y,b = 0,0
    {0, 0, 0, 1, 0, 0, 0, 0},  // y,b = 0,1
    {0, 0, 1, 0, 1, 0, 1, 0},  // y,b = 1,0
    {2, 2, 0, 0, 0, 0, 0, 0},  // y,b = 1,1
    {0, 0, 1, 0, 1, 0, 0, 1},  // y,b = 2,0
    {1, 1, 0, 0, 0, 0, 1, 1},  // y,b = 2,1
    {0, 0, 1, 0, 0, 1, 0, 0},  // y,b = 3,0
    {0, 0, 0, 0, 1, 1, 0, 0},  // y,b = 3,1
};

template <std::size_t R, std::size_t C>
GameTable game_from_grid(const int (&grid)[R][C], std::size_t n, std::size_t m) {
  std::vector<double> coeff(n * m * n * m, 0.0);
  for (std::size_t row = 0; row < R; ++row)
    for (std::size_t col = 0; col < C; ++col) {
      const std::size_t y = row / m, b = row % m;
      const std::size_t x = col / m, a = col % m;
      coeff[((x * m + a) * n + y) * m + b] = static_cast<double>(grid[row][col]);
    }
  return GameTable(n, n, m, m, std::move(coeff));
}

}  // namespace detail

inline const std::vector<GameMetadata>& builtin_games() {
  static const std::vector<GameMetadata> games = {
      {"chsh", "two-setting two-outcome correlation game with +/-1 pay-offs"},
      {"i3322", "four-setting two-outcome game in nonnegative form"},
  };
  return games;
}

inline GameTable builtin_game(std::string_view name) {
  if (name == "chsh") return detail::game_from_grid(detail::kChshGrid, 2, 2);
  if (name == "i3322") return detail::game_from_grid(detail::kI3322Grid, 4, 2);
  throw LookupError("unknown built-in game '" + std::string(name) +
                    "' (available: chsh, i3322)");
}

// Swap the two parties: coefficients transpose as c'(y,b,x,a) = c(x,a,y,b)
// and the marginals trade places.
inline GameTable transpose_game(const GameTable& g) {
  std::vector<double> coeff(g.coefficients().size());
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t a = 0; a < ma; ++a)
      for (std::size_t y = 0; y < nb; ++y)
        for (std::size_t b = 0; b < mb; ++b)
          coeff[((y * mb + b) * na + x) * ma + a] = g.coeff(x, a, y, b);
  return GameTable(nb, na, mb, ma, std::move(coeff), g.marginals_b(),
                   g.marginals_a());
}

// Largest score any behaviour, signaling or not, can reach: pick the best
// outcome pair for every setting pair.
inline double algebraic_max(const GameTable& g) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.n_settings_a(); ++x)
    for (std::size_t y = 0; y < g.n_settings_b(); ++y) {
      double best = g.coeff(x, 0, y, 0);
      for (std::size_t a = 0; a < g.n_outcomes_a(); ++a)
        for (std::size_t b = 0; b < g.n_outcomes_b(); ++b)
          best = std::max(best, g.coeff(x, a, y, b));
      total += g.marginal_a(x) * g.marginal_b(y) * best;
    }
  return total;
}

}  // namespace bellasym
