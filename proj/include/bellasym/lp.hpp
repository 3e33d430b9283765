#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bellasym {

// Equality-form linear program:  maximize c.w  s.t.  A w = b, w >= 0.
// The matrix is stored column-major (column j starts at matrix[j*num_rows]).
struct LinearProgram {
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::vector<double> objective;  // size num_cols
  std::vector<double> matrix;     // size num_rows * num_cols, column-major
  std::vector<double> rhs;        // size num_rows
};

struct LpOptions {
  std::uint64_t pivot_cap = 1'000'000;
  double opt_tol = 1e-10;  // reduced-cost threshold for optimality
  double feas_tol = 1e-9;  // phase-1 residual allowed at a feasible point
};

struct LpSolution {
  double optimum = 0.0;
  // Nonzero coordinates of the optimal vertex, sorted by column index.
  std::vector<std::pair<std::size_t, double>> support;
  std::uint64_t pivots = 0;
  double feasibility_residual = 0.0;  // max |A w - b| at the returned point
};

namespace detail {

// Row-major Gauss-Jordan inverse with partial pivoting.  The bases this
// solver sees stay small (tens of rows), so a fresh O(n^3) inversion per
// pivot is cheaper than maintaining a factorization, and it keeps every
// iteration's arithmetic independent of the path taken to reach it.
inline std::vector<double> invert_dense(std::vector<double> m, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(m[r * n + k]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-11)
      throw SolverError(
          "simplex basis is numerically singular; perturb the coefficients "
          "slightly and retry");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(m[piv * n + c], m[k * n + c]);
        std::swap(inv[piv * n + c], inv[k * n + c]);
      }
    }
    const double scale = 1.0 / m[k * n + k];
    for (std::size_t c = 0; c < n; ++c) {
      m[k * n + c] *= scale;
      inv[k * n + c] *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = m[r * n + k];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        m[r * n + c] -= f * m[k * n + c];
        inv[r * n + c] -= f * inv[k * n + c];
      }
    }
  }
  return inv;
}

}  // namespace detail

// Two-phase primal simplex on the equality form above.
//
// Pricing is Dantzig's rule (most positive reduced cost, lowest column
// index on ties).  A run of thirty degenerate pivots switches the phase
// to Bland's rule for good, which breaks any cycle; soft resets back to
// Dantzig are unsafe because noise-scale ratios masquerade as progress
// inside a cycle.  The
// leaving row is the ratio-test minimum over rows whose pivot element is
// comfortably positive (tiny elements are admitted only when nothing
// better exists, to keep the refreshed basis well conditioned), ties
// resolved toward the smallest basis column index.  All choices are
// deterministic, so equal inputs give bit-equal outputs.
//
// Phase 1 starts from an all-artificial basis (rows are sign-flipped to
// make b nonnegative) and drives the artificial mass to zero; leftover
// basic artificials are pivoted out before phase 2, and a row none of the
// structural columns can cover is redundant and dropped.
// The returned vertex gets one step of iterative refinement before the
// residual and support are read off.
inline LpSolution lp_solve(const LinearProgram& lp, const LpOptions& opt = {}) {
  std::size_t R = lp.num_rows;
  const std::size_t C = lp.num_cols;
  if (R == 0 || C == 0) throw SolverError("empty linear program");
  if (lp.matrix.size() != R * C || lp.rhs.size() != R ||
      lp.objective.size() != C)
    throw SolverError("linear program arrays do not match its dimensions");

  std::vector<double> mat = lp.matrix;
  std::vector<double> b = lp.rhs;
  for (std::size_t i = 0; i < R; ++i) {
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (std::size_t j = 0; j < C; ++j) mat[j * R + i] = -mat[j * R + i];
    }
  }

  // Basis holds column ids; ids >= C are the phase-1 artificials (unit
  // columns).
  std::vector<std::size_t> basis(R);
  std::iota(basis.begin(), basis.end(), C);
  std::vector<char> in_basis(C, 0);

  std::uint64_t pivots = 0;
  std::vector<double> inv;  // basis inverse, refreshed every iteration

  auto basis_matrix = [&]() {
    std::vector<double> bm(R * R, 0.0);
    for (std::size_t p = 0; p < R; ++p) {
      const std::size_t j = basis[p];
      if (j < C)
        for (std::size_t i = 0; i < R; ++i) bm[i * R + p] = mat[j * R + i];
      else
        bm[(j - C) * R + p] = 1.0;
    }
    return bm;
  };
  auto refresh_inverse = [&]() { inv = detail::invert_dense(basis_matrix(), R); };
  auto basic_point = [&]() {
    std::vector<double> x(R, 0.0);
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t k = 0; k < R; ++k) x[i] += inv[i * R + k] * b[k];
    return x;
  };
  auto column_entry = [&](std::size_t j, std::size_t i) {
    return j < C ? mat[j * R + i] : (j - C == i ? 1.0 : 0.0);
  };

  auto run_phase = [&](int phase) {
    auto cost_of = [&](std::size_t j) {
      if (j < C) return phase == 1 ? 0.0 : lp.objective[j];
      return phase == 1 ? -1.0 : 0.0;
    };
    bool bland = false;
    std::size_t degenerate_streak = 0;
    for (;;) {
      if (pivots > opt.pivot_cap)
        throw SolverError("simplex pivot cap of " +
                          std::to_string(opt.pivot_cap) + " exceeded");
      refresh_inverse();
      const std::vector<double> x = basic_point();
      // duals: y = c_B . B^{-1}
      std::vector<double> y(R, 0.0);
      for (std::size_t i = 0; i < R; ++i) {
        const double cb = cost_of(basis[i]);
        if (cb == 0.0) continue;
        for (std::size_t k = 0; k < R; ++k) y[k] += cb * inv[i * R + k];
      }
      // entering column: structural only
      std::size_t enter = C;
      double best_rc = opt.opt_tol;
      for (std::size_t j = 0; j < C; ++j) {
        if (in_basis[j]) continue;
        double rc = cost_of(j);
        for (std::size_t i = 0; i < R; ++i) rc -= y[i] * mat[j * R + i];
        if (rc > best_rc) {
          enter = j;
          best_rc = rc;
          if (bland) break;  // first improving column is enough
        }
      }
      if (enter == C) return;  // optimal for this phase

      // direction d = B^{-1} A_enter
      std::vector<double> d(R, 0.0);
      for (std::size_t i = 0; i < R; ++i)
        for (std::size_t k = 0; k < R; ++k)
          d[i] += inv[i * R + k] * mat[enter * R + k];

      // Degenerate basic values sit at zero up to noise; clamping keeps a
      // (-1e-13 / tiny-pivot) pair from producing a wild negative ratio.
      auto ratio_pass = [&](double pivot_floor) {
        std::size_t leave = R;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < R; ++i) {
          if (d[i] > pivot_floor) {
            const double ratio = std::max(x[i], 0.0) / d[i];
            if (ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 &&
                 (leave == R || basis[i] < basis[leave]))) {
              best_ratio = ratio;
              leave = i;
            }
          }
        }
        return std::make_pair(leave, best_ratio);
      };
      auto [leave, best_ratio] = ratio_pass(1e-9);
      if (leave == R) std::tie(leave, best_ratio) = ratio_pass(1e-12);
      if (leave == R)
        throw SolverError("linear program is unbounded");

      if (basis[leave] < C) in_basis[basis[leave]] = 0;
      basis[leave] = enter;
      in_basis[enter] = 1;
      ++pivots;

      if (best_ratio <= 1e-10) {
        if (++degenerate_streak > 30) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  };

  run_phase(1);
  refresh_inverse();
  {
    std::vector<double> x = basic_point();
    double artificial_mass = 0.0;
    for (std::size_t i = 0; i < R; ++i)
      if (basis[i] >= C) artificial_mass += std::abs(x[i]);
    if (artificial_mass > opt.feas_tol)
      throw SolverError("linear program is infeasible (phase-1 residual " +
                        std::to_string(artificial_mass) + ")");
    // Pivot leftover zero-valued artificials out of the basis.  One whose
    // tableau row holds no structural pivot marks its constraint as a
    // consequence of the others; such rows are dropped from the working
    // system (the surviving basis stays invertible and the point stays
    // feasible).
    std::vector<char> drop_pos(R, 0), drop_row(R, 0);
    bool any_drop = false;
    for (std::size_t i = 0; i < R; ++i) {
      if (basis[i] < C) continue;
      std::size_t found = C;
      for (std::size_t j = 0; j < C && found == C; ++j) {
        if (in_basis[j]) continue;
        double dij = 0.0;
        for (std::size_t k = 0; k < R; ++k)
          dij += inv[i * R + k] * mat[j * R + k];
        if (std::abs(dij) > 1e-9) found = j;
      }
      if (found == C) {
        drop_pos[i] = 1;
        drop_row[basis[i] - C] = 1;
        any_drop = true;
        continue;
      }
      basis[i] = found;
      in_basis[found] = 1;
      ++pivots;
      refresh_inverse();
    }
    if (any_drop) {
      std::vector<std::size_t> new_row_id(R, 0);
      std::size_t nr = 0;
      for (std::size_t r = 0; r < R; ++r) {
        new_row_id[r] = nr;
        if (!drop_row[r]) ++nr;
      }
      std::vector<double> nmat(nr * C), nb(nr);
      for (std::size_t j = 0; j < C; ++j)
        for (std::size_t r = 0; r < R; ++r)
          if (!drop_row[r]) nmat[j * nr + new_row_id[r]] = mat[j * R + r];
      for (std::size_t r = 0; r < R; ++r)
        if (!drop_row[r]) nb[new_row_id[r]] = b[r];
      std::vector<std::size_t> nbasis;
      nbasis.reserve(nr);
      for (std::size_t i = 0; i < R; ++i) {
        if (drop_pos[i]) continue;
        std::size_t id = basis[i];
        if (id >= C) id = C + new_row_id[id - C];
        nbasis.push_back(id);
      }
      mat = std::move(nmat);
      b = std::move(nb);
      basis = std::move(nbasis);
      R = nr;
    }
  }
  run_phase(2);

  refresh_inverse();
  std::vector<double> x = basic_point();
  // one step of iterative refinement: x += B^{-1}(b - Bx)
  {
    std::vector<double> r = b;
    for (std::size_t p = 0; p < R; ++p)
      for (std::size_t i = 0; i < R; ++i)
        r[i] -= column_entry(basis[p], i) * x[p];
    for (std::size_t i = 0; i < R; ++i) {
      double dx = 0.0;
      for (std::size_t k = 0; k < R; ++k) dx += inv[i * R + k] * r[k];
      x[i] += dx;
    }
  }

  LpSolution sol;
  sol.pivots = pivots;
  std::vector<double> residual = b;
  for (std::size_t p = 0; p < R; ++p) {
    for (std::size_t i = 0; i < R; ++i)
      residual[i] -= column_entry(basis[p], i) * x[p];
    if (basis[p] < C) {
      sol.optimum += lp.objective[basis[p]] * x[p];
      if (x[p] > 1e-12) sol.support.emplace_back(basis[p], x[p]);
    }
  }
  for (double v : residual)
    sol.feasibility_residual = std::max(sol.feasibility_residual, std::abs(v));
  std::sort(sol.support.begin(), sol.support.end());
  return sol;
}

}  // namespace bellasym
