#include <catch2/catch_amalgamated.hpp>

#include <bellasym/game.hpp>
#include <bellasym/lhv.hpp>

using namespace bellasym;

TEST_CASE("strategy counting saturates at the cap", "[lhv]") {
  const GameTable chsh = builtin_game("chsh");
  CHECK(strategy_count(chsh) == 16);  // 2^2 * 2^2
  CHECK(strategy_count(builtin_game("i3322")) == 256);
  const GameTable big(8, 8, 8, 8, std::vector<double>(8 * 8 * 8 * 8, 0.0));
  CHECK_THROWS_AS(strategy_count(big), CapacityError);
  CHECK_THROWS_AS(classical_bound(big), CapacityError);
}

TEST_CASE("strategy range walks responses in lexicographic order", "[lhv]") {
  const GameTable g = builtin_game("chsh");
  StrategyRange range(g);
  CHECK(range.size() == 16);
  const DeterministicStrategy first = range.at(0);
  CHECK(first.alice_response == std::vector<std::size_t>{0, 0});
  CHECK(first.bob_response == std::vector<std::size_t>{0, 0});
  // g-minor: index 1 bumps Bob's last setting first
  CHECK(range.at(1).bob_response == std::vector<std::size_t>{0, 1});
  CHECK(range.at(4).alice_response == std::vector<std::size_t>{0, 1});
  CHECK(range.at(15).alice_response == std::vector<std::size_t>{1, 1});

  std::size_t n = 0;
  for (const DeterministicStrategy& s : range) {
    CHECK(s == range.at(n));
    ++n;
  }
  CHECK(n == 16);
}

TEST_CASE("classical bounds of the built-ins", "[lhv]") {
  const auto chsh = classical_bound(builtin_game("chsh"));
  CHECK(chsh.value == 0.5);
  CHECK(chsh.witness.alice_response == std::vector<std::size_t>{0, 0});
  CHECK(chsh.witness.bob_response == std::vector<std::size_t>{0, 0});

  const auto i3322 = classical_bound(builtin_game("i3322"));
  CHECK(i3322.value == 0.375);
  CHECK(i3322.witness.alice_response == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(i3322.witness.bob_response == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("classical bound maximizes over every strategy", "[lhv]") {
  // brute-force cross-check on a small random game
  std::vector<double> c(16);
  std::uint64_t s = 12345;
  for (double& v : c) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    v = static_cast<double>(s >> 40) / static_cast<double>(1 << 24) - 0.5;
  }
  const GameTable g(2, 2, 2, 2, std::move(c));
  const auto res = classical_bound(g);
  double best = -1e300;
  for (const DeterministicStrategy& st : StrategyRange(g))
    best = std::max(best, evaluate_box_value(g, product_box(g, st)));
  CHECK(res.value == Catch::Approx(best).margin(1e-12));
  CHECK(evaluate_box_value(g, product_box(g, res.witness)) ==
        Catch::Approx(res.value).margin(1e-12));
}

TEST_CASE("box validates conditional normalization", "[lhv]") {
  // p(ab|xy) layout: ((a*mb + b)*na + x)*nb + y
  std::vector<double> p(16, 0.25);
  CHECK_NOTHROW(Box(2, 2, 2, 2, p));
  p[0] = 0.3;
  CHECK_THROWS_AS(Box(2, 2, 2, 2, p), ValidationError);
  p[0] = -0.25;
  CHECK_THROWS_AS(Box(2, 2, 2, 2, p), ValidationError);
}

TEST_CASE("product box of a deterministic strategy", "[lhv]") {
  const GameTable g = builtin_game("chsh");
  DeterministicStrategy s;
  s.alice_response = {0, 1};
  s.bob_response = {1, 0};
  const Box box = product_box(g, s);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const double expect =
              (a == s.alice_response[x] && b == s.bob_response[y]) ? 1.0 : 0.0;
          CHECK(box.prob(a, b, x, y) == expect);
        }
  const auto rep = check_no_signaling(box);
  CHECK(rep.a_to_b);
  CHECK(rep.b_to_a);
  CHECK(rep.max_violation == 0.0);

  DeterministicStrategy bad;
  bad.alice_response = {0};
  bad.bob_response = {0, 0};
  CHECK_THROWS_AS(product_box(g, bad), ShapeError);
}

TEST_CASE("box evaluation rejects shape mismatches", "[lhv]") {
  const GameTable chsh = builtin_game("chsh");
  const GameTable i3322 = builtin_game("i3322");
  DeterministicStrategy s;
  s.alice_response = {0, 0};
  s.bob_response = {0, 0};
  const Box box = product_box(chsh, s);
  CHECK_THROWS_AS(evaluate_box_value(i3322, box), ShapeError);
  CHECK(evaluate_box_value(chsh, box) == 0.5);
}

TEST_CASE("no-signaling detector sees a signaling box", "[lhv]") {
  // Bob's outcome copies Alice's setting: p(b = x) = 1
  std::vector<double> p(16, 0.0);
  auto at = [&](std::size_t a, std::size_t b, std::size_t x,
                std::size_t y) -> double& {
    return p[((a * 2 + b) * 2 + x) * 2 + y];
  };
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) at(0, x, x, y) = 1.0;
  const Box box(2, 2, 2, 2, std::move(p));
  const auto rep = check_no_signaling(box);
  CHECK_FALSE(rep.a_to_b);
  CHECK(rep.b_to_a);
  CHECK(rep.max_violation == 1.0);
}
