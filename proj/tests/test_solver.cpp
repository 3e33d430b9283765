#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <bellasym/lhv.hpp>
#include <bellasym/solver.hpp>

using namespace bellasym;

TEST_CASE("two-level family enumerates distinct distributions", "[solver]") {
  const auto fam2 = detail::two_level_family(2, 8);
  CHECK(fam2.size() == 15);  // uniform + 2 * 7 sharpened singletons
  const auto fam4 = detail::two_level_family(4, 8);
  CHECK(fam4.size() == 99);

  // first entry is the uniform row, exactly
  CHECK(fam4.front().peak_prob == 0.25);
  CHECK(fam4.front().to_vector() == std::vector<double>(4, 0.25));

  std::set<std::vector<double>> seen;
  for (const auto& d : fam4) {
    const auto v = d.to_vector();
    CHECK(seen.insert(v).second);  // no duplicates
    double sum = 0.0;
    for (double p : v) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    CHECK(d.min_entropy_bits() >= 0.0);
    CHECK(d.min_entropy_bits() <= 2.0);
  }

  // fully revealing rows are present: a delta on each setting
  for (std::size_t x = 0; x < 4; ++x) {
    std::vector<double> delta(4, 0.0);
    delta[x] = 1.0;
    CHECK(seen.count(delta) == 1);
  }

  CHECK_THROWS_AS(detail::two_level_family(2, 1), ValidationError);
}

TEST_CASE("expanded alphabet pairs responses with the family", "[solver]") {
  const GameTable g = builtin_game("chsh");
  const ExpandedAlphabet alph = build_expanded_alphabet(g, Party::A, 4);
  const auto fam = detail::two_level_family(2, 4);
  CHECK(alph.settings_family.size() == fam.size());
  CHECK(alph.atoms.size() == 4 * fam.size());  // 2^2 responses
  CHECK(alph.atoms.front().response == std::vector<std::size_t>{0, 0});
  CHECK(alph.atoms.front().log_peak ==
        std::log2(alph.atoms.front().settings.peak_prob));
}

TEST_CASE("best response value at uniform rows is the classical bound",
          "[solver]") {
  for (const char* name : {"chsh", "i3322"}) {
    const GameTable g = builtin_game(name);
    const double v = detail::best_response_value(
        g, g.marginals_a(), g.marginals_b(), nullptr, nullptr);
    CHECK(v == Catch::Approx(classical_bound(g).value).margin(1e-12));
  }
}

TEST_CASE("budget checks reject mismatched entropies", "[solver]") {
  const GameTable g = builtin_game("chsh");
  KnowledgeBudget b = KnowledgeBudget::for_game(g, 0.5, 0.5);
  b.entropy_x = 2.0;  // belongs to a four-setting game
  CHECK_THROWS_AS(solve_adversarial_bound(g, b), ValidationError);
  b = KnowledgeBudget::for_game(g, 0.5, 0.5);
  b.xi_x = 1.5;
  CHECK_THROWS_AS(solve_adversarial_bound(g, b), ValidationError);
}

TEST_CASE("chsh bounds follow the half-slope line", "[solver]") {
  const GameTable g = builtin_game("chsh");
  AdversarialBoundSolver solver(g);
  for (double xi : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto res = solver.solve(KnowledgeBudget::for_game(g, xi, 0.0));
    CHECK(res.value == Catch::Approx(0.5 + 0.5 * xi).margin(1e-9));
    const auto swapped = solver.solve(KnowledgeBudget::for_game(g, 0.0, xi));
    CHECK(swapped.value == Catch::Approx(res.value).margin(1e-9));
  }
}

TEST_CASE("i3322 bounds at the corners and midpoints", "[solver]") {
  const GameTable g = builtin_game("i3322");
  AdversarialBoundSolver solver(g);
  auto value = [&](double xx, double xy) {
    return solver.solve(KnowledgeBudget::for_game(g, xx, xy)).value;
  };
  CHECK(value(0.0, 0.0) == Catch::Approx(0.375).margin(1e-9));
  CHECK(value(1.0, 0.0) == Catch::Approx(0.6875).margin(1e-9));
  CHECK(value(0.0, 1.0) == Catch::Approx(0.5625).margin(1e-9));
  CHECK(value(1.0, 1.0) == Catch::Approx(0.75).margin(1e-9));
  CHECK(value(0.25, 0.0) == Catch::Approx(0.490558397513).margin(1e-9));
  CHECK(value(0.5, 0.0) == Catch::Approx(0.582345041071).margin(1e-9));
  CHECK(value(0.75, 0.0) == Catch::Approx(0.634922520536).margin(1e-9));
  CHECK(value(0.0, 0.5) == Catch::Approx(0.46875).margin(1e-9));
}

TEST_CASE("corners agree with the closed forms", "[solver]") {
  for (const char* name : {"chsh", "i3322"}) {
    const GameTable g = builtin_game(name);
    AdversarialBoundSolver solver(g);
    CHECK(solver.solve(KnowledgeBudget::for_game(g, 1.0, 0.0)).value ==
          Catch::Approx(closed_form_full_knowledge(g, KnowledgeSide::A))
              .margin(1e-9));
    CHECK(solver.solve(KnowledgeBudget::for_game(g, 0.0, 1.0)).value ==
          Catch::Approx(closed_form_full_knowledge(g, KnowledgeSide::B))
              .margin(1e-9));
    CHECK(solver.solve(KnowledgeBudget::for_game(g, 1.0, 1.0)).value ==
          Catch::Approx(closed_form_full_knowledge(g, KnowledgeSide::Both))
              .margin(1e-9));
    CHECK(closed_form_full_knowledge(g, KnowledgeSide::Both) ==
          algebraic_max(g));
  }
  const GameTable skew(2, 2, 2, 2, std::vector<double>(16, 0.0), {0.3, 0.7},
                       {});
  CHECK_THROWS_AS(closed_form_full_knowledge(skew, KnowledgeSide::A),
                  InputError);
}

TEST_CASE("bounds grow with the knowledge budget", "[solver]") {
  const GameTable g = builtin_game("i3322");
  AdversarialBoundSolver solver(g);
  double prev = -1.0;
  for (int i = 0; i <= 8; ++i) {
    const double xi = static_cast<double>(i) / 8.0;
    const double v = solver.solve(KnowledgeBudget::for_game(g, xi, 0.0)).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("finer height grids do not lower the bound", "[solver]") {
  const GameTable g = builtin_game("i3322");
  AdversarialBoundSolver coarse(g, 4), fine(g, 8);
  for (double xi : {0.25, 0.5, 0.75}) {
    const KnowledgeBudget b = KnowledgeBudget::for_game(g, xi, 0.0);
    CHECK(fine.solve(b).value >= coarse.solve(b).value - 1e-9);
  }
}

TEST_CASE("witnesses are valid strategies achieving the bound", "[solver]") {
  const GameTable g = builtin_game("i3322");
  AdversarialBoundSolver solver(g);
  for (auto [xx, xy] : {std::pair{0.5, 0.0},
                        std::pair{0.25, 0.75},
                        std::pair{1.0, 0.0},
                        std::pair{0.0, 0.0}}) {
    const BoundResult res = solver.solve(KnowledgeBudget::for_game(g, xx, xy));
    CHECK_NOTHROW(validate_strategy(g, res.witness));
    CHECK(evaluate_eve_value(g, res.witness) ==
          Catch::Approx(res.value).margin(1e-9));
    CHECK(relative_knowledge(res.witness.conditional_a(), g.marginals_a()) <=
          xx + 1e-9);
    CHECK(relative_knowledge(res.witness.conditional_b(), g.marginals_b()) <=
          xy + 1e-9);
    CHECK(res.diagnostics.support_size <= res.diagnostics.lp_rows);
    CHECK(res.diagnostics.feasibility_residual <= 1e-9);
  }
}

TEST_CASE("budget tightness is reported", "[solver]") {
  const GameTable g = builtin_game("i3322");
  AdversarialBoundSolver solver(g);
  const auto mid = solver.solve(KnowledgeBudget::for_game(g, 0.5, 0.0));
  CHECK(mid.diagnostics.budget_a_tight);  // knowledge is worth spending
  const auto blind = solver.solve(KnowledgeBudget::for_game(g, 0.0, 0.0));
  CHECK(blind.diagnostics.budget_a_tight);
  CHECK(blind.diagnostics.budget_b_tight);
}

TEST_CASE("solving is deterministic", "[solver]") {
  const GameTable g = builtin_game("i3322");
  const KnowledgeBudget b = KnowledgeBudget::for_game(g, 0.375, 0.125);
  const BoundResult r1 = solve_adversarial_bound(g, b);
  const BoundResult r2 = solve_adversarial_bound(g, b);
  CHECK(r1.value == r2.value);
  CHECK(r1.witness.joint_weights == r2.witness.joint_weights);
  CHECK(r1.diagnostics.lp_pivots == r2.diagnostics.lp_pivots);
}

TEST_CASE("coordinate ascent stays at or below the lp bound", "[solver]") {
  const GameTable g = builtin_game("chsh");
  AdversarialBoundSolver solver(g);
  for (auto [xx, xy] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.0},
                        std::pair{1.0, 0.0}, std::pair{0.5, 0.5}}) {
    const KnowledgeBudget b = KnowledgeBudget::for_game(g, xx, xy);
    const BoundResult lp = solver.solve(b);
    const BoundResult ca = coordinate_ascent_oracle(g, b, 6, 2024);
    CHECK_NOTHROW(validate_strategy(g, ca.witness));
    CHECK(ca.value <= lp.value + 1e-6);
    CHECK(ca.value >= classical_bound(g).value - 1e-9);
    CHECK(evaluate_eve_value(g, ca.witness) ==
          Catch::Approx(ca.value).margin(1e-6));
  }
  CHECK_THROWS_AS(coordinate_ascent_oracle(
                      g, KnowledgeBudget::for_game(g, 0.5, 0.0), 0, 1),
                  ValidationError);
}

TEST_CASE("ascent witnesses respect their budgets", "[solver]") {
  const GameTable g = builtin_game("i3322");
  const KnowledgeBudget b = KnowledgeBudget::for_game(g, 0.5, 0.25);
  const BoundResult ca = coordinate_ascent_oracle(g, b, 8, 7);
  CHECK(relative_knowledge(ca.witness.conditional_a(), g.marginals_a()) <=
        0.5 + 1e-6);
  CHECK(relative_knowledge(ca.witness.conditional_b(), g.marginals_b()) <=
        0.25 + 1e-6);
  const BoundResult again = coordinate_ascent_oracle(g, b, 8, 7);
  CHECK(ca.value == again.value);
}

TEST_CASE("ascent survives numerically degenerate iterations", "[solver]") {
  // gradient steps can drive two symbol rows nearly parallel and make an
  // iteration's weight LP singular; the restart must end on its best
  // instead of aborting the whole run
  const GameTable g = builtin_game("i3322");
  const KnowledgeBudget b = KnowledgeBudget::for_game(g, 0.75, 0.25);
  BoundResult ca;
  REQUIRE_NOTHROW(ca = coordinate_ascent_oracle(g, b, 8, 0));
  CHECK_NOTHROW(validate_strategy(g, ca.witness));
  const BoundResult lp = solve_adversarial_bound(g, b);
  CHECK(ca.value <= lp.value + 1e-6);
  CHECK(ca.value >= classical_bound(g).value - 1e-9);
}
