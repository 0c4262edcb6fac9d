// Copyright 2026 The sg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "sg/game.hpp"
#include "sg/game_io.hpp"
#include "test_util.hpp"

using namespace sg;

namespace {

MixedStrategyProfile profile2(std::vector<double> x, std::vector<double> y) {
  MixedStrategyProfile p;
  p.distributions = {std::move(x), std::move(y)};
  return p;
}

}  // namespace

TEST_CASE("expected payoff at (defect, defect) in the prisoners dilemma") {
  const NormalFormGame g = prisoners_dilemma().to_normal_form();
  const auto v = expected_payoff(g, profile2({0, 1}, {0, 1}));
  CHECK(v[0] == -2.0);
  CHECK(v[1] == -2.0);
}

TEST_CASE("expected payoff on pure profiles equals the tensor entry exactly") {
  std::mt19937_64 rng(42);
  NormalFormGame g;
  g.choice_counts = {2, 3, 2};
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  g.payoffs.resize(g.joint_count() * 3);
  for (double& v : g.payoffs) v = d(rng);
  g.validate();

  for (int c0 = 0; c0 < 2; ++c0)
    for (int c1 = 0; c1 < 3; ++c1)
      for (int c2 = 0; c2 < 2; ++c2) {
        const std::vector<int> choice{c0, c1, c2};
        const auto v = expected_payoff(g, MixedStrategyProfile::pure(g, choice));
        for (int a = 0; a < 3; ++a) CHECK(v[a] == g.payoff(choice, a));
      }
}

TEST_CASE("expected payoff of chicken under uniform play") {
  const BimatrixGame g = chicken_game();
  // Oracle: plain average of the four outcomes.
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      sum_a += g.A(i, j);
      sum_b += g.B(i, j);
    }
  const auto v =
      expected_payoff(g.to_normal_form(), profile2({0.5, 0.5}, {0.5, 0.5}));
  CHECK(v[0] == doctest::Approx(sum_a / 4.0).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(sum_b / 4.0).epsilon(1e-14));
  CHECK(v[0] == doctest::Approx(-2.5));
}

TEST_CASE("two-agent expected payoff equals the bilinear forms x'Ay and x'By") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const BimatrixGame g = test::random_integer_game(rng, 3, 4, -9, 9);
    const auto p = test::random_profile(rng, g.to_normal_form());
    const auto v = expected_payoff(g.to_normal_form(), p);
    double xay = 0.0, xby = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) {
        xay += p.distributions[0][i] * g.A(i, j) * p.distributions[1][j];
        xby += p.distributions[0][i] * g.B(i, j) * p.distributions[1][j];
      }
    CHECK(v[0] == doctest::Approx(xay).epsilon(1e-13));
    CHECK(v[1] == doctest::Approx(xby).epsilon(1e-13));
  }
}

TEST_CASE("conditional payoff equals expected payoff with the choice forced pure") {
  std::mt19937_64 rng(9);
  NormalFormGame g;
  g.choice_counts = {3, 2, 2};
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  g.payoffs.resize(g.joint_count() * 3);
  for (double& v : g.payoffs) v = d(rng);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = test::random_profile(rng, g);
    for (int agent = 0; agent < 3; ++agent) {
      const auto cond = conditional_payoff(g, agent, p);
      for (int j = 0; j < g.choice_counts[agent]; ++j) {
        auto forced = p;
        forced.distributions[agent].assign(g.choice_counts[agent], 0.0);
        forced.distributions[agent][j] = 1.0;
        CHECK(cond[j] ==
              doctest::Approx(expected_payoff(g, forced)[agent]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("expected payoff is multilinear in each agent's distribution") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const NormalFormGame g = test::random_integer_game(rng, 3, 4, -9, 9).to_normal_form();
    const auto p = test::random_profile(rng, g);
    auto q = p;
    q.distributions[0] = test::random_profile(rng, g).distributions[0];
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double alpha = unit(rng);

    auto mixed = p;
    for (std::size_t j = 0; j < mixed.distributions[0].size(); ++j)
      mixed.distributions[0][j] =
          alpha * p.distributions[0][j] + (1 - alpha) * q.distributions[0][j];

    const auto vp = expected_payoff(g, p);
    const auto vq = expected_payoff(g, q);
    const auto vm = expected_payoff(g, mixed);
    for (int a = 0; a < 2; ++a)
      CHECK(vm[a] == doctest::Approx(alpha * vp[a] + (1 - alpha) * vq[a]).epsilon(1e-12));
  }
}

TEST_CASE("conditional payoffs in chicken") {
  const NormalFormGame g = chicken_game().to_normal_form();
  SUBCASE("opponent swerves for sure") {
    const auto c = conditional_payoff(g, 0, profile2({0.5, 0.5}, {1, 0}));
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 1.0);
  }
  SUBCASE("opponent plays the indifference mix (0.9, 0.1)") {
    const auto c = conditional_payoff(g, 0, profile2({0.5, 0.5}, {0.9, 0.1}));
    CHECK(c[0] == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(-0.1).epsilon(1e-12));
  }
  SUBCASE("pure opponents pick out payoff columns") {
    const auto c = conditional_payoff(g, 1, profile2({0, 1}, {0.5, 0.5}));
    CHECK(c[0] == -1.0);  // agent 2 swerves against straight
    CHECK(c[1] == -10.0);
  }
}

TEST_CASE("conditional payoff rejects bad agent index") {
  const NormalFormGame g = chicken_game().to_normal_form();
  CHECK_THROWS_AS(conditional_payoff(g, 5, profile2({1, 0}, {1, 0})), DimensionError);
}

TEST_CASE("best responses") {
  SUBCASE("defect dominates in the prisoners dilemma") {
    const NormalFormGame g = prisoners_dilemma().to_normal_form();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = test::random_profile(rng, g);
      const auto best = best_response_set(g, 0, p);
      REQUIRE(best.size() == 1);
      CHECK(best[0] == 1);
    }
  }
  SUBCASE("constant payoffs tie everything") {
    Matrix c(2, 3, 7.0);
    const NormalFormGame g = BimatrixGame{c, c}.to_normal_form();
    const auto best = best_response_set(g, 1, profile2({0.3, 0.7}, {1, 0, 0}));
    CHECK(best == std::vector<int>{0, 1, 2});
  }
  SUBCASE("chicken against the indifference mix ties both choices") {
    const NormalFormGame g = chicken_game().to_normal_form();
    const auto best = best_response_set(g, 0, profile2({0.5, 0.5}, {0.9, 0.1}));
    CHECK(best == std::vector<int>{0, 1});
  }
}

TEST_CASE("nash verification on the paper games") {
  const BimatrixGame pd = prisoners_dilemma();
  SUBCASE("(defect, defect) is a pure equilibrium") {
    const auto check = is_nash(pd, profile2({0, 1}, {0, 1}), 1e-9);
    REQUIRE(check.accepted);
    CHECK(check.point.kind == EquilibriumKind::pure);
    CHECK(check.point.payoffs[0] == -2.0);
    CHECK(check.point.epsilon == 0.0);
  }
  SUBCASE("(cooperate, cooperate) is rejected with gain 1 by defecting") {
    const auto check = is_nash(pd, profile2({1, 0}, {1, 0}), 1e-9);
    REQUIRE_FALSE(check.accepted);
    CHECK(check.gain == doctest::Approx(1.0));
    CHECK(check.better_choice == 1);
    CHECK(check.supported_choice == 0);
  }
  SUBCASE("the chicken indifference profile is a mixed equilibrium") {
    const auto check =
        is_nash(chicken_game(), profile2({0.9, 0.1}, {0.9, 0.1}), 1e-9);
    REQUIRE(check.accepted);
    CHECK(check.point.kind == EquilibriumKind::mixed);
  }
}

TEST_CASE("nash acceptance matches the pure-deviation definition on random profiles") {
  std::mt19937_64 rng(17);
  int accepted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const NormalFormGame g = test::random_integer_game(rng, 2, 2, -4, 4).to_normal_form();
    MixedStrategyProfile p;
    if (trial % 3 == 0) {
      std::uniform_int_distribution<int> coin(0, 1);
      p = MixedStrategyProfile::pure(g, {coin(rng), coin(rng)});
    } else {
      p = test::random_profile(rng, g);
    }
    const bool support_form = is_nash(g, p, 1e-9).accepted;
    const bool deviation_form = test::nash_by_pure_deviations(g, p, 1e-9);
    CHECK(support_form == deviation_form);
    accepted += support_form;
  }
  CHECK(accepted > 0);  // the sample includes real equilibria
}

TEST_CASE("nash status is invariant under constant payoff shifts") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const BimatrixGame g = test::random_integer_game(rng, 2, 3, -5, 5);
    const auto p = test::random_profile(rng, g.to_normal_form());
    const BimatrixGame shifted{g.A.shifted(shift(rng)), g.B.shifted(shift(rng))};
    CHECK(is_nash(g, p, 1e-9).accepted == is_nash(shifted, p, 1e-9).accepted);
  }
}

TEST_CASE("positivize") {
  SUBCASE("chicken shifts by +11") {
    const BimatrixGame g = positivize(chicken_game());
    CHECK(g.A == Matrix{{11, 10}, {12, 1}});
    CHECK(g.B == Matrix{{11, 12}, {10, 1}});
  }
  SUBCASE("prisoners dilemma shifts by +4") {
    const BimatrixGame g = positivize(prisoners_dilemma());
    CHECK(g.A == Matrix{{3, 1}, {4, 2}});
  }
  SUBCASE("strictly positive games are untouched") {
    const BimatrixGame g{Matrix{{1, 2}, {3, 4}}, Matrix{{4, 3}, {2, 1}}};
    CHECK(positivize(g).A == g.A);
    CHECK(positivize(g).B == g.B);
  }
  SUBCASE("equilibria survive the shift") {
    const auto before = is_nash(chicken_game(), profile2({0.9, 0.1}, {0.9, 0.1}), 1e-9);
    const auto after =
        is_nash(positivize(chicken_game()), profile2({0.9, 0.1}, {0.9, 0.1}), 1e-9);
    CHECK(before.accepted);
    CHECK(after.accepted);
  }
}

TEST_CASE("normalization bijection between equilibria and (u, v) pairs") {
  const BimatrixGame g = positivize(chicken_game());

  SUBCASE("pure (swerve, straight)") {
    const auto check = is_nash(g, profile2({1, 0}, {0, 1}), 1e-9);
    REQUIRE(check.accepted);
    const auto [u, v] = nash_to_uv(g, check.point);
    // x^T A y = 10 and x^T B y = 12 at that cell of the shifted game.
    CHECK(u[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(u[1] == 0.0);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(1.0 / 10.0).epsilon(1e-14));

    // Oracle: relations u^T B <= 1, A v <= 1 with equality on supports.
    for (int j = 0; j < 2; ++j) {
      const double ub = u[0] * g.B(0, j) + u[1] * g.B(1, j);
      CHECK(ub <= 1.0 + 1e-12);
      if (v[j] > 0) CHECK(ub == doctest::Approx(1.0).epsilon(1e-13));
    }
    for (int i = 0; i < 2; ++i) {
      const double av = g.A(i, 0) * v[0] + g.A(i, 1) * v[1];
      CHECK(av <= 1.0 + 1e-12);
      if (u[i] > 0) CHECK(av == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  SUBCASE("symmetric equilibrium maps to symmetric (u, v)") {
    const auto check = is_nash(g, profile2({0.9, 0.1}, {0.9, 0.1}), 1e-9);
    REQUIRE(check.accepted);
    const auto [u, v] = nash_to_uv(g, check.point);
    CHECK(u[0] == doctest::Approx(v[0]).epsilon(1e-13));
    CHECK(u[1] == doctest::Approx(v[1]).epsilon(1e-13));
  }

  SUBCASE("round trip is the identity to 1e-12") {
    for (const auto& prof :
         {profile2({1, 0}, {0, 1}), profile2({0, 1}, {1, 0}), profile2({0.9, 0.1}, {0.9, 0.1})}) {
      const auto check = is_nash(g, prof, 1e-9);
      REQUIRE(check.accepted);
      const auto [u, v] = nash_to_uv(g, check.point);
      const auto back = uv_to_nash(g, u, v);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(back.profile.distributions[i][j] ==
                doctest::Approx(prof.distributions[i][j]).epsilon(1e-12));
    }
  }

  SUBCASE("non-positive games are refused") {
    const auto check = is_nash(chicken_game(), profile2({1, 0}, {0, 1}), 1e-9);
    CHECK_THROWS_AS(nash_to_uv(chicken_game(), check.point), std::invalid_argument);
  }

  SUBCASE("points that are not equilibria fail the relation check") {
    EquilibriumPoint fake;
    fake.profile = profile2({1, 0}, {1, 0});  // (swerve, swerve) is not an equilibrium
    CHECK_THROWS_AS(nash_to_uv(g, fake), std::invalid_argument);
    CHECK_THROWS_AS(uv_to_nash(g, {1, 1}, {1, 1}), std::invalid_argument);
  }

  SUBCASE("zero vectors have no strategy image") {
    CHECK_THROWS_WITH_AS(uv_to_nash(g, {0, 0}, {0, 0.1}),
                         "uv_to_nash: artificial equilibrium has no strategy image",
                         std::invalid_argument);
  }
}

TEST_CASE("game potential evaluation") {
  CHECK(game_potential(Matrix{{1, 0}, {0, 1}}, {0.5, 0.5}) == doctest::Approx(0.25));
  CHECK(game_potential(Matrix{{2, 0}, {0, 2}}, {1.0, 0.0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = unit(rng);
    CHECK(game_potential(Matrix(3, 3, 0.0), {a, (1 - a) / 2, (1 - a) / 2}) == 0.0);
  }
  CHECK_THROWS_AS(game_potential(Matrix{{1, 2, 3}, {4, 5, 6}}, {0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("potential triple condition") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-5.0, 5.0);

  SUBCASE("symmetric matrices always satisfy it") {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(trial % 4);
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) A(i, j) = A(j, i) = d(rng);
      CHECK(has_potential_condition(A, 1e-9).holds);
    }
  }

  SUBCASE("diagonal matrices satisfy it") {
    Matrix A(4, 4, 0.0);
    for (int i = 0; i < 4; ++i) A(i, i) = d(rng);
    CHECK(has_potential_condition(A, 1e-9).holds);
  }

  SUBCASE("two-strategy matrices satisfy it identically") {
    // Triples over two indices always repeat an index, and repeated
    // indices cancel term by term.
    CHECK(has_potential_condition(Matrix{{0, 1}, {0, 0}}, 1e-9).holds);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix A(2, 2);
      A(0, 0) = d(rng);
      A(0, 1) = d(rng);
      A(1, 0) = d(rng);
      A(1, 1) = d(rng);
      CHECK(has_potential_condition(A, 1e-9).holds);
    }
  }

  SUBCASE("an asymmetric 3x3 fails with a concrete distinct triple") {
    Matrix A(3, 3, 0.0);
    A(0, 1) = 1.0;
    const auto check = has_potential_condition(A, 1e-9);
    REQUIRE_FALSE(check.holds);
    CHECK(check.worst_violation == doctest::Approx(1.0));
    const auto [i, j, k] = check.worst_triple;
    CHECK(i != j);
    CHECK(j != k);
    CHECK(k != i);
  }

  SUBCASE("perturbing one off-diagonal entry of a symmetric matrix violates by epsilon") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3 + trial % 3;
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) A(i, j) = A(j, i) = d(rng);
      const double eps = 0.5 + std::abs(d(rng));
      A(0, 1) += eps;
      const auto check = has_potential_condition(A, 1e-9);
      REQUIRE_FALSE(check.holds);
      CHECK(check.worst_violation == doctest::Approx(eps).epsilon(1e-12));
    }
  }
}

TEST_CASE("the T-S family of symmetric games") {
  SUBCASE("construction") {
    const BimatrixGame g = ts_family_game({2.0, -1.0});
    CHECK(g.A == Matrix{{1, -1}, {2, 0}});
    CHECK(g.B == Matrix{{1, 2}, {-1, 0}});
  }

  const auto pure_equilibria = [](const BimatrixGame& g) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        MixedStrategyProfile p;
        p.distributions = {{i == 0 ? 1.0 : 0.0, i == 0 ? 0.0 : 1.0},
                           {j == 0 ? 1.0 : 0.0, j == 0 ? 0.0 : 1.0}};
        if (is_nash(g, p, 1e-9).accepted) out.emplace_back(i, j);
      }
    return out;
  };

  SUBCASE("(T,S) = (2,-1): one pure equilibrium at (defect, defect)") {
    const auto pure = pure_equilibria(ts_family_game({2.0, -1.0}));
    CHECK(pure == std::vector<std::pair<int, int>>{{1, 1}});
    CHECK(ts_region({2.0, -1.0}) == TSRegion::prisoners_dilemma);
  }
  SUBCASE("(T,S) = (0.5,-0.5): pure equilibria at (R,R) and (P,P)") {
    const auto pure = pure_equilibria(ts_family_game({0.5, -0.5}));
    CHECK(pure == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(ts_region({0.5, -0.5}) == TSRegion::stag_hunt);
  }
  SUBCASE("(T,S) = (2,0.5): pure equilibria at the off-diagonal cells") {
    const auto pure = pure_equilibria(ts_family_game({2.0, 0.5}));
    CHECK(pure == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    CHECK(ts_region({2.0, 0.5}) == TSRegion::chicken);
  }
}

TEST_CASE("bimatrix and normal form round trip losslessly") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const BimatrixGame g = test::random_integer_game(rng, 3, 4, -9, 9);
    const BimatrixGame back = g.to_normal_form().to_bimatrix();
    CHECK(back.A == g.A);
    CHECK(back.B == g.B);
  }
}

TEST_CASE("profile validation names the offending agent") {
  const NormalFormGame g = chicken_game().to_normal_form();
  try {
    profile2({0.5, 0.5}, {0.7, 0.7}).validate_against(g);
    FAIL("expected a DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.agent == 1);
  }
  CHECK_THROWS_AS(profile2({0.5, 0.5, 0.0}, {1, 0}).validate_against(g), DimensionError);
  CHECK_THROWS_AS(profile2({-0.1, 1.1}, {1, 0}).validate_against(g), DimensionError);
}

TEST_CASE("game JSON parsing") {
  SUBCASE("bimatrix form") {
    const auto loaded = parse_game_json(
        nlohmann::json::parse(R"({"A": [[0,-1],[1,-10]], "B": [[0,1],[-1,-10]]})"), "test");
    REQUIRE(loaded.bimatrix.has_value());
    CHECK(loaded.bimatrix->A == chicken_game().A);
    CHECK(loaded.bimatrix->B == chicken_game().B);
  }
  SUBCASE("general form with three agents") {
    const auto loaded = parse_game_json(nlohmann::json::parse(R"({
      "agents": 3, "choices": [2, 2, 2],
      "payoffs": [[[[1,2,3],[4,5,6]],[[7,8,9],[10,11,12]]],
                  [[[13,14,15],[16,17,18]],[[19,20,21],[22,23,24]]]]
    })"),
                                        "test");
    CHECK(loaded.game.num_agents() == 3);
    CHECK(loaded.game.payoff({0, 1, 0}, 2) == 9.0);
    CHECK(loaded.game.payoff({1, 1, 1}, 0) == 22.0);
    CHECK_FALSE(loaded.bimatrix.has_value());
  }
  SUBCASE("ragged payoff arrays are rejected") {
    CHECK_THROWS_AS(parse_game_json(nlohmann::json::parse(
                        R"({"A": [[1,2],[3]], "B": [[1,2],[3,4]]})"),
                                    "test"),
                    GameParseError);
    CHECK_THROWS_AS(parse_game_json(nlohmann::json::parse(R"({
      "agents": 2, "choices": [2, 2], "payoffs": [[[1,2],[3,4]],[[5,6]]]
    })"),
                                    "test"),
                    GameParseError);
  }
  SUBCASE("non-finite payoffs are rejected") {
    nlohmann::json j;
    j["A"] = {{std::numeric_limits<double>::infinity()}};
    j["B"] = {{1.0}};
    CHECK_THROWS_AS(parse_game_json(j, "test"), GameParseError);
    nlohmann::json k;
    k["A"] = {{std::numeric_limits<double>::quiet_NaN()}};
    k["B"] = {{1.0}};
    CHECK_THROWS_AS(parse_game_json(k, "test"), GameParseError);
  }
  SUBCASE("builtins") {
    CHECK(load_builtin_game("pd").bimatrix->A == prisoners_dilemma().A);
    CHECK(load_builtin_game("chicken").bimatrix->A == chicken_game().A);
    CHECK(load_builtin_game("ts:2,-1").bimatrix->A == Matrix{{1, -1}, {2, 0}});
    CHECK_THROWS_AS(load_builtin_game("nope"), GameParseError);
    CHECK_THROWS_AS(load_builtin_game("ts:1"), GameParseError);
    CHECK_THROWS_AS(load_builtin_game("ts:a,b"), GameParseError);
  }
  SUBCASE("serialization round trip") {
    const auto j = game_to_json(chicken_game());
    const auto loaded = parse_game_json(j, "test");
    CHECK(loaded.bimatrix->A == chicken_game().A);
  }
}
