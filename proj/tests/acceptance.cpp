// End-to-end acceptance checks, one printed line per criterion.  Exits
// zero only if every line reads PASS.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include <bellasym/asymmetry.hpp>
#include <bellasym/solver.hpp>

using namespace bellasym;

namespace {

bool g_all_ok = true;

void report(bool ok, const char* name, const std::string& detail = "") {
  g_all_ok = g_all_ok && ok;
  if (ok)
    std::printf("PASS: %s\n", name);
  else
    std::printf("FAIL: %s%s%s\n", name, detail.empty() ? "" : " -- ",
                detail.c_str());
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

// Deterministic random 2-setting/2-outcome games with integer
// coefficients in [-2, 2] and uniform setting marginals.
std::vector<GameTable> random_games(std::size_t count, std::uint64_t seed) {
  std::vector<GameTable> games;
  std::uint64_t state = seed;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 33;
  };
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> coeff(16);
    for (double& c : coeff)
      c = static_cast<double>(static_cast<int>(next() % 5) - 2);
    games.emplace_back(2, 2, 2, 2, std::move(coeff));
  }
  return games;
}

// Witness integrity for one solve result: the witness must be a valid
// strategy, re-evaluate to the reported value, respect the knowledge
// budget on both sides, and have a basic support.
std::string witness_defect(const GameTable& g, const BoundResult& res) {
  try {
    validate_strategy(g, res.witness);
  } catch (const InputError& e) {
    return std::string("witness invalid: ") + e.what();
  }
  const double replay = evaluate_eve_value(g, res.witness);
  if (std::abs(replay - res.value) > 1e-9)
    return "re-evaluation " + std::to_string(replay) + " vs value " +
           std::to_string(res.value);
  const double ka =
      relative_knowledge(res.witness.conditional_a(), g.marginals_a());
  const double kb =
      relative_knowledge(res.witness.conditional_b(), g.marginals_b());
  if (ka > res.budget.xi_x + 1e-9)
    return "side A leaks " + std::to_string(ka) + " > budget " +
           std::to_string(res.budget.xi_x);
  if (kb > res.budget.xi_y + 1e-9)
    return "side B leaks " + std::to_string(kb) + " > budget " +
           std::to_string(res.budget.xi_y);
  if (res.diagnostics.support_size > res.diagnostics.lp_rows)
    return "support " + std::to_string(res.diagnostics.support_size) +
           " exceeds row count " + std::to_string(res.diagnostics.lp_rows);
  return "";
}

}  // namespace

int main() {
  std::vector<std::pair<const GameTable*, BoundResult>> tracked;
  std::vector<GameTable> keep_alive;

  // 1. chsh classical bound: exactly 0.5, enumeration finishes quickly
  try {
    const GameTable chsh = builtin_game("chsh");
    const double t0 = now_seconds();
    const ClassicalBoundResult r = classical_bound(chsh);
    const double dt = now_seconds() - t0;
    report(r.value == 0.5 && dt < 1.0, "chsh classical bound",
           "value " + std::to_string(r.value) + " in " + std::to_string(dt) +
               " s");
  } catch (const std::exception& e) {
    report(false, "chsh classical bound", e.what());
  }

  // 2. i3322 classical bound reproduces the frozen enumeration value
  try {
    const double v = classical_bound(builtin_game("i3322")).value;
    report(std::abs(v - 0.375) <= 1e-12, "i3322 classical bound regression",
           "value " + std::to_string(v));
  } catch (const std::exception& e) {
    report(false, "i3322 classical bound regression", e.what());
  }

  // 3. solver values at the four budget corners match the closed forms
  try {
    bool ok = true;
    std::string detail;
    keep_alive.push_back(builtin_game("chsh"));
    keep_alive.push_back(builtin_game("i3322"));
    const double expect_chsh[4] = {0.5, 1.0, 1.0, 1.0};
    const double expect_i3322[4] = {0.375, 0.6875, 0.5625, 0.75};
    for (std::size_t gi = 0; gi < 2; ++gi) {
      const GameTable& g = keep_alive[gi];
      const double* expect = gi == 0 ? expect_chsh : expect_i3322;
      const double closed[4] = {
          classical_bound(g).value,
          closed_form_full_knowledge(g, KnowledgeSide::A),
          closed_form_full_knowledge(g, KnowledgeSide::B),
          closed_form_full_knowledge(g, KnowledgeSide::Both)};
      const double corners[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
      for (int c = 0; c < 4; ++c) {
        const BoundResult res = solve_adversarial_bound(
            g, KnowledgeBudget::for_game(g, corners[c][0], corners[c][1]));
        tracked.push_back({&g, res});
        if (std::abs(res.value - closed[c]) > 1e-9 ||
            std::abs(closed[c] - expect[c]) > 1e-9) {
          ok = false;
          detail = "game " + std::to_string(gi) + " corner " +
                   std::to_string(c) + ": solver " +
                   std::to_string(res.value) + ", closed form " +
                   std::to_string(closed[c]);
        }
      }
    }
    report(ok, "full-knowledge endpoints", detail);
  } catch (const std::exception& e) {
    report(false, "full-knowledge endpoints", e.what());
  }

  // 4. chsh shows no asymmetry anywhere on the knowledge axis
  try {
    const GameTable chsh = builtin_game("chsh");
    bool ok = true;
    std::string detail;
    for (double xi : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double d = intrinsic_asymmetry(chsh, xi);
      if (d > 1e-9) {
        ok = false;
        detail = "delta(" + std::to_string(xi) + ") = " + std::to_string(d);
      }
    }
    report(ok, "chsh symmetry", detail);
  } catch (const std::exception& e) {
    report(false, "chsh symmetry", e.what());
  }

  // 5. i3322 is strictly asymmetric, delta(1) = 1/8, and the full sweep
  //    stays fast
  std::vector<CurvePoint> sweep_i3322_k8;
  try {
    const GameTable g = builtin_game("i3322");
    const double t0 = now_seconds();
    SweepOptions opt;
    opt.steps = 21;
    sweep_i3322_k8 = sweep_curve(g, opt);
    const double dt = now_seconds() - t0;
    bool ok = dt < 60.0;
    std::string detail = "sweep in " + std::to_string(dt) + " s";
    for (const CurvePoint& p : sweep_i3322_k8) {
      if ((std::abs(p.xi_x - 0.25) < 1e-12 || std::abs(p.xi_x - 0.5) < 1e-12 ||
           std::abs(p.xi_x - 0.75) < 1e-12) &&
          !(p.delta > 0.0)) {
        ok = false;
        detail = "delta(" + std::to_string(p.xi_x) + ") not positive";
      }
      if (std::abs(p.xi_x - 1.0) < 1e-12 && std::abs(p.delta - 0.125) > 1e-9) {
        ok = false;
        detail = "delta(1) = " + std::to_string(p.delta);
      }
    }
    report(ok, "i3322 asymmetry", detail);
  } catch (const std::exception& e) {
    report(false, "i3322 asymmetry", e.what());
  }

  // 6. bounds grow with knowledge and never drop when the height grid is
  //    refined from 4 to 8
  try {
    bool ok = true;
    std::string detail;
    for (const char* name : {"chsh", "i3322"}) {
      const GameTable g = builtin_game(name);
      SweepOptions fine;
      fine.steps = 21;
      SweepOptions coarse = fine;
      coarse.heights = 4;
      const std::vector<CurvePoint> hi =
          std::string(name) == "i3322" && !sweep_i3322_k8.empty()
              ? sweep_i3322_k8
              : sweep_curve(g, fine);
      const std::vector<CurvePoint> lo = sweep_curve(g, coarse);
      for (std::size_t i = 0; i + 1 < hi.size(); ++i) {
        if (hi[i + 1].r_xy < hi[i].r_xy - 1e-9 ||
            hi[i + 1].r_yx < hi[i].r_yx - 1e-9) {
          ok = false;
          detail = std::string(name) + " not monotone at step " +
                   std::to_string(i + 1);
        }
      }
      for (std::size_t i = 0; i < hi.size(); ++i) {
        if (hi[i].r_xy < lo[i].r_xy - 1e-9 || hi[i].r_yx < lo[i].r_yx - 1e-9) {
          ok = false;
          detail = std::string(name) + " refinement regressed at step " +
                   std::to_string(i);
        }
      }
    }
    report(ok, "monotonicity and grid refinement", detail);
  } catch (const std::exception& e) {
    report(false, "monotonicity and grid refinement", e.what());
  }

  // Shared pool for criteria 7 and 8.
  std::vector<GameTable> pool = random_games(20, 0xB5);
  pool.push_back(builtin_game("i3322"));

  // 7. swapping the parties mirrors the bound surface
  try {
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < pool.size() && ok; ++k) {
      const GameTable& g = pool[k];
      const GameTable gt = transpose_game(g);
      for (double xa : {0.0, 0.5, 1.0}) {
        for (double xb : {0.0, 0.5, 1.0}) {
          const BoundResult lhs = solve_adversarial_bound(
              g, KnowledgeBudget::for_game(g, xa, xb));
          const BoundResult rhs = solve_adversarial_bound(
              gt, KnowledgeBudget::for_game(gt, xb, xa));
          if (std::abs(lhs.value - rhs.value) > 1e-9) {
            ok = false;
            detail = "game " + std::to_string(k) + " at (" +
                     std::to_string(xa) + ", " + std::to_string(xb) + "): " +
                     std::to_string(lhs.value) + " vs " +
                     std::to_string(rhs.value);
          }
        }
      }
    }
    report(ok, "party-swap covariance", detail);
  } catch (const std::exception& e) {
    report(false, "party-swap covariance", e.what());
  }

  // 8. the ascent oracle never beats the LP, and both bounds stay inside
  //    [classical, algebraic]
  try {
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < pool.size() && ok; ++k) {
      const GameTable& g = pool[k];
      const double lo = classical_bound(g).value;
      const double hi = algebraic_max(g);
      const double budgets[4][2] = {{0, 0}, {0.5, 0}, {0, 0.5}, {1, 1}};
      for (int c = 0; c < 4 && ok; ++c) {
        const KnowledgeBudget budget =
            KnowledgeBudget::for_game(g, budgets[c][0], budgets[c][1]);
        const BoundResult lp = solve_adversarial_bound(g, budget);
        const BoundResult ca = coordinate_ascent_oracle(g, budget, 6, 0);
        tracked.push_back({&g, lp});
        tracked.push_back({&g, ca});
        if (lp.value < ca.value - 1e-6 || lp.value < lo - 1e-9 ||
            lp.value > hi + 1e-9 || ca.value < lo - 1e-9 ||
            ca.value > hi + 1e-9) {
          ok = false;
          detail = "game " + std::to_string(k) + " budget " +
                   std::to_string(c) + ": lp " + std::to_string(lp.value) +
                   ", ascent " + std::to_string(ca.value) + ", range [" +
                   std::to_string(lo) + ", " + std::to_string(hi) + "]";
        }
      }
    }
    report(ok, "ascent oracle consistency", detail);
  } catch (const std::exception& e) {
    report(false, "ascent oracle consistency", e.what());
  }

  // 9. every witness produced above survives the integrity checks
  try {
    bool ok = true;
    std::string detail;
    for (const auto& [g, res] : tracked) {
      const std::string defect = witness_defect(*g, res);
      if (!defect.empty()) {
        ok = false;
        detail = defect;
        break;
      }
    }
    report(ok && !tracked.empty(), "witness integrity", detail);
  } catch (const std::exception& e) {
    report(false, "witness integrity", e.what());
  }

  // 10. a million-shot run agrees with the analytic value and the referee
  //     draws stay uniform; the report is reproducible bit for bit
  try {
    const GameTable chsh = builtin_game("chsh");
    const BoundResult res = solve_adversarial_bound(
        chsh, KnowledgeBudget::for_game(chsh, 0.5, 0.0));
    const std::uint64_t shots = 1000000;
    const SimulationReport r1 = simulate(chsh, res.witness, shots, 12345);
    const SimulationReport r2 = simulate(chsh, res.witness, shots, 12345);
    const double analytic = evaluate_eve_value(chsh, res.witness);
    const double freq_sigma = std::sqrt(0.25 / static_cast<double>(shots));
    bool ok = std::abs(r1.empirical_value - analytic) <=
              4.0 * r1.stderr_value + 1e-12;
    std::string detail = "empirical " + std::to_string(r1.empirical_value) +
                         " vs analytic " + std::to_string(analytic) +
                         " (stderr " + std::to_string(r1.stderr_value) + ")";
    for (double f : r1.setting_freq_a)
      if (std::abs(f - 0.5) > 4.0 * freq_sigma) ok = false;
    for (double f : r1.setting_freq_b)
      if (std::abs(f - 0.5) > 4.0 * freq_sigma) ok = false;
    if (!(r1.empirical_value == r2.empirical_value &&
          r1.stderr_value == r2.stderr_value &&
          r1.setting_freq_a == r2.setting_freq_a &&
          r1.setting_freq_b == r2.setting_freq_b)) {
      ok = false;
      detail = "same seed gave different reports";
    }
    report(ok, "simulation agreement", detail);
  } catch (const std::exception& e) {
    report(false, "simulation agreement", e.what());
  }

  // 11. full knowledge of x makes the observed box signal from Alice to
  //     Bob; a blind product-weight witness stays no-signaling
  try {
    const GameTable chsh = builtin_game("chsh");
    const BoundResult leaky = solve_adversarial_bound(
        chsh, KnowledgeBudget::for_game(chsh, 1.0, 0.0));
    const NoSignalingReport bad = check_no_signaling(
        effective_box(chsh, leaky.witness));
    const BoundResult blind = solve_adversarial_bound(
        chsh, KnowledgeBudget::for_game(chsh, 0.0, 0.0));
    const NoSignalingReport good = check_no_signaling(
        effective_box(chsh, blind.witness));
    const bool ok = !bad.a_to_b && bad.max_violation > 0.1 && good.a_to_b &&
                    good.b_to_a && good.max_violation <= 1e-9;
    report(ok, "signaling detection",
           "violation " + std::to_string(bad.max_violation) + " / blind " +
               std::to_string(good.max_violation));
  } catch (const std::exception& e) {
    report(false, "signaling detection", e.what());
  }

  return g_all_ok ? 0 : 1;
}
