#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "game.hpp"
#include "util.hpp"

namespace bellasym {

// Largest number of (f, g) strategy pairs classical_bound will walk
// unless the caller raises the cap.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

// A pair of deterministic response functions: alice_response[x] = a,
// bob_response[y] = b.
struct DeterministicStrategy {
  std::vector<std::size_t> alice_response;
  std::vector<std::size_t> bob_response;

  friend bool operator==(const DeterministicStrategy&,
                         const DeterministicStrategy&) = default;
};

// Conditional outcome distributions p(a, b | x, y), stored row-major over
// (a, b, x, y).  Every (x, y) slice must be a distribution.
class Box {
 public:
  Box(std::size_t n_outcomes_a, std::size_t n_outcomes_b,
      std::size_t n_settings_a, std::size_t n_settings_b,
      std::vector<double> probs)
      : ma_(n_outcomes_a),
        mb_(n_outcomes_b),
        na_(n_settings_a),
        nb_(n_settings_b),
        p_(std::move(probs)) {
    if (ma_ == 0 || mb_ == 0 || na_ == 0 || nb_ == 0)
      throw ValidationError("box: all dimensions must be >= 1");
    if (p_.size() != ma_ * mb_ * na_ * nb_)
      throw ShapeError("box: probability array size does not match dimensions");
    for (double v : p_) {
      if (!std::isfinite(v)) throw ValidationError("box: non-finite probability");
      if (v < 0.0) throw ValidationError("box: negative probability");
    }
    for (std::size_t x = 0; x < na_; ++x)
      for (std::size_t y = 0; y < nb_; ++y) {
        double s = 0.0;
        for (std::size_t a = 0; a < ma_; ++a)
          for (std::size_t b = 0; b < mb_; ++b) s += prob(a, b, x, y);
        if (std::abs(s - 1.0) > kProbTol)
          throw ValidationError(
              "box: outcome probabilities for settings (" + std::to_string(x) +
              "," + std::to_string(y) + ") sum to " + detail::format_double(s));
      }
  }

  std::size_t n_outcomes_a() const { return ma_; }
  std::size_t n_outcomes_b() const { return mb_; }
  std::size_t n_settings_a() const { return na_; }
  std::size_t n_settings_b() const { return nb_; }

  double prob(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return p_[((a * mb_ + b) * na_ + x) * nb_ + y];
  }

 private:
  std::size_t ma_, mb_, na_, nb_;
  std::vector<double> p_;
};

// The deterministic box p(ab|xy) = [a = f(x)][b = g(y)].
inline Box product_box(const GameTable& g, const DeterministicStrategy& s) {
  if (s.alice_response.size() != g.n_settings_a() ||
      s.bob_response.size() != g.n_settings_b())
    throw ShapeError("strategy does not match the game's setting counts");
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  std::vector<double> p(ma * mb * na * nb, 0.0);
  for (std::size_t x = 0; x < na; ++x) {
    if (s.alice_response[x] >= ma)
      throw RangeError("strategy outcome out of range for party A");
    for (std::size_t y = 0; y < nb; ++y) {
      if (s.bob_response[y] >= mb)
        throw RangeError("strategy outcome out of range for party B");
      const std::size_t a = s.alice_response[x], b = s.bob_response[y];
      p[((a * mb + b) * na + x) * nb + y] = 1.0;
    }
  }
  return Box(ma, mb, na, nb, std::move(p));
}

// Expected score of a behaviour under the game's setting distributions.
inline double evaluate_box_value(const GameTable& g, const Box& box) {
  if (box.n_settings_a() != g.n_settings_a() ||
      box.n_settings_b() != g.n_settings_b() ||
      box.n_outcomes_a() != g.n_outcomes_a() ||
      box.n_outcomes_b() != g.n_outcomes_b())
    throw ShapeError("box dimensions do not match the game table");
  double total = 0.0;
  for (std::size_t x = 0; x < g.n_settings_a(); ++x)
    for (std::size_t y = 0; y < g.n_settings_b(); ++y) {
      double s = 0.0;
      for (std::size_t a = 0; a < g.n_outcomes_a(); ++a)
        for (std::size_t b = 0; b < g.n_outcomes_b(); ++b)
          s += box.prob(a, b, x, y) * g.coeff(x, a, y, b);
      total += g.marginal_a(x) * g.marginal_b(y) * s;
    }
  return total;
}

// Number of deterministic strategy pairs, M_A^N_A * M_B^N_B; throws once
// the count passes `cap` so callers never start a hopeless walk.
inline std::uint64_t strategy_count(const GameTable& g,
                                    std::uint64_t cap = kDefaultEnumerationCap) {
  const std::uint64_t fa =
      detail::checked_pow(g.n_outcomes_a(), g.n_settings_a(), cap);
  const std::uint64_t gb =
      detail::checked_pow(g.n_outcomes_b(), g.n_settings_b(), cap);
  std::uint64_t total = cap + 1;
  if (fa <= cap && gb <= cap && (gb == 0 || fa <= cap / gb)) total = fa * gb;
  if (total > cap)
    throw CapacityError("strategy enumeration needs more than " +
                        std::to_string(cap) +
                        " pairs; raise the cap to allow it");
  return total;
}

namespace detail {

// Big-endian digit decode: index -> response function over `n` settings
// with `m` outcomes, so index 0 is the all-zero function and the last
// setting varies fastest.
inline void decode_response(std::uint64_t index, std::size_t n, std::size_t m,
                            std::vector<std::size_t>& out) {
  out.resize(n);
  for (std::size_t i = n; i-- > 0;) {
    out[i] = static_cast<std::size_t>(index % m);
    index /= m;
  }
}

}  // namespace detail

// Lexicographic view over all deterministic strategy pairs: f-index major,
// g-index minor, each decoded big-endian.  Instances are cheap; strategies
// are materialized one at a time so the walk streams in O(1) memory and
// disjoint index ranges can be handed to independent workers.
class StrategyRange {
 public:
  explicit StrategyRange(const GameTable& g,
                         std::uint64_t cap = kDefaultEnumerationCap)
      : na_(g.n_settings_a()),
        nb_(g.n_settings_b()),
        ma_(g.n_outcomes_a()),
        mb_(g.n_outcomes_b()),
        total_(strategy_count(g, cap)) {
    gb_ = detail::checked_pow(mb_, nb_, total_ == 0 ? 1 : total_);
  }

  std::uint64_t size() const { return total_; }

  DeterministicStrategy at(std::uint64_t pair_index) const {
    if (pair_index >= total_)
      throw RangeError("strategy pair index out of range");
    DeterministicStrategy s;
    detail::decode_response(pair_index / gb_, na_, ma_, s.alice_response);
    detail::decode_response(pair_index % gb_, nb_, mb_, s.bob_response);
    return s;
  }

  class iterator {
   public:
    using value_type = DeterministicStrategy;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator(const StrategyRange* range, std::uint64_t index)
        : range_(range), index_(index) {}
    DeterministicStrategy operator*() const { return range_->at(index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++index_;
      return old;
    }
    friend bool operator==(const iterator& l, const iterator& r) {
      return l.index_ == r.index_;
    }

   private:
    const StrategyRange* range_;
    std::uint64_t index_;
  };

  iterator begin() const { return iterator(this, 0); }
  iterator end() const { return iterator(this, total_); }

 private:
  std::size_t na_, nb_, ma_, mb_;
  std::uint64_t total_, gb_;
};

struct ClassicalBoundResult {
  double value;
  DeterministicStrategy witness;
};

// Exact local bound by exhaustive enumeration.  For each f the inner table
// T[y][b] = sum_x p(x) c(x, f(x), y, b) is built once, so every g costs
// only N_B lookups.  Ties keep the first maximizer, i.e. the
// lexicographically smallest (f, g).
inline ClassicalBoundResult classical_bound(
    const GameTable& g, std::uint64_t cap = kDefaultEnumerationCap) {
  strategy_count(g, cap);  // throws if over the cap
  const std::size_t na = g.n_settings_a(), nb = g.n_settings_b();
  const std::size_t ma = g.n_outcomes_a(), mb = g.n_outcomes_b();
  const std::uint64_t fa = detail::checked_pow(ma, na, cap);
  const std::uint64_t gb = detail::checked_pow(mb, nb, cap);

  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_f = 0, best_g = 0;
  std::vector<std::size_t> f(na);
  std::vector<double> t(nb * mb);
  for (std::uint64_t fi = 0; fi < fa; ++fi) {
    detail::decode_response(fi, na, ma, f);
    for (std::size_t y = 0; y < nb; ++y)
      for (std::size_t b = 0; b < mb; ++b) {
        double s = 0.0;
        for (std::size_t x = 0; x < na; ++x)
          s += g.marginal_a(x) * g.coeff(x, f[x], y, b);
        t[y * mb + b] = s;
      }
    std::vector<std::size_t> gfun(nb, 0);
    for (std::uint64_t gi = 0; gi < gb; ++gi) {
      double v = 0.0;
      for (std::size_t y = 0; y < nb; ++y)
        v += g.marginal_b(y) * t[y * mb + gfun[y]];
      if (v > best) {
        best = v;
        best_f = fi;
        best_g = gi;
      }
      // odometer step: last setting varies fastest
      for (std::size_t y = nb; y-- > 0;) {
        if (++gfun[y] < mb) break;
        gfun[y] = 0;
      }
    }
  }
  DeterministicStrategy w;
  detail::decode_response(best_f, na, ma, w.alice_response);
  detail::decode_response(best_g, nb, mb, w.bob_response);
  return {best, std::move(w)};
}

struct NoSignalingReport {
  bool a_to_b;           // Bob's marginals independent of x
  bool b_to_a;           // Alice's marginals independent of y
  double max_violation;  // largest marginal spread found
};

// Check whether either party's marginal outcome statistics depend on the
// other party's setting, to within 1e-9.
inline NoSignalingReport check_no_signaling(const Box& box) {
  double viol_ab = 0.0;  // Alice's setting leaking to Bob
  for (std::size_t y = 0; y < box.n_settings_b(); ++y)
    for (std::size_t b = 0; b < box.n_outcomes_b(); ++b) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t x = 0; x < box.n_settings_a(); ++x) {
        double m = 0.0;
        for (std::size_t a = 0; a < box.n_outcomes_a(); ++a)
          m += box.prob(a, b, x, y);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      viol_ab = std::max(viol_ab, hi - lo);
    }
  double viol_ba = 0.0;
  for (std::size_t x = 0; x < box.n_settings_a(); ++x)
    for (std::size_t a = 0; a < box.n_outcomes_a(); ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t y = 0; y < box.n_settings_b(); ++y) {
        double m = 0.0;
        for (std::size_t b = 0; b < box.n_outcomes_b(); ++b)
          m += box.prob(a, b, x, y);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      viol_ba = std::max(viol_ba, hi - lo);
    }
  return {viol_ab <= kNoSignalingTol, viol_ba <= kNoSignalingTol,
          std::max(viol_ab, viol_ba)};
}

}  // namespace bellasym
