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

#include <map>
#include <random>
#include <set>

#include "sg/game_io.hpp"
#include "sg/lemke_howson.hpp"
#include "test_util.hpp"

using namespace sg;

namespace {

using Key = std::pair<RationalVector, RationalVector>;

std::set<Key> equilibrium_keys(const std::vector<RationalEquilibrium>& eqs) {
  std::set<Key> keys;
  for (const auto& e : eqs) keys.insert({e.x, e.y});
  return keys;
}

}  // namespace

TEST_CASE("rationalization keeps integer payoffs exact and records the scale") {
  const auto rg = RationalBimatrix::from(chicken_game());
  CHECK(rg.scale == 1'000'000);
  CHECK(rg.a(0, 1) == Rational(-1));
  CHECK(rg.b(1, 1) == Rational(-10));
  const auto rg2 = RationalBimatrix::from(BimatrixGame{Matrix{{0.5, 1.25}, {2, 3}},
                                                       Matrix{{1, 1}, {1, 1}}});
  CHECK(rg2.a(0, 0) == Rational(1, 2));
  CHECK(rg2.a(0, 1) == Rational(5, 4));
}

TEST_CASE("labels of polytope points") {
  const auto rg = RationalBimatrix::from(positivize(chicken_game()));

  SUBCASE("the origin carries all own-strategy labels") {
    const auto ls = labels_of(RationalVector{Rational(0), Rational(0)}, Side::X, rg);
    CHECK(ls.to_vector() == std::vector<int>{1, 2});
    const auto ly = labels_of(RationalVector{Rational(0), Rational(0)}, Side::Y, rg);
    CHECK(ly.to_vector() == std::vector<int>{3, 4});
  }

  SUBCASE("the X vertex (1/12, 0) is labelled {2, 4}") {
    // x_2 = 0 binds and the second column of B is tight: with the
    // +11-shifted game, x^T B = (11/12, 1) at this vertex.
    const auto ls = labels_of(RationalVector{Rational(1, 12), Rational(0)}, Side::X, rg);
    CHECK(ls.to_vector() == std::vector<int>{2, 4});
  }

  SUBCASE("infeasible points are refused with the violated constraint") {
    try {
      labels_of(RationalVector{Rational(1, 10), Rational(0)}, Side::X, rg);
      FAIL("expected infeasibility");
    } catch (const InfeasibleVertexError& e) {
      CHECK(e.constraint == "(x^T B)_1 <= 1");
    }
    CHECK_THROWS_AS(labels_of(RationalVector{Rational(-1), Rational(0)}, Side::Y, rg),
                    InfeasibleVertexError);
  }

  SUBCASE("a completely labelled pair away from the origin is an equilibrium") {
    const auto res = lemke_howson(rg, 1);
    const auto lx = labels_of(res.equilibrium.u, Side::X, rg);
    const auto ly = labels_of(res.equilibrium.v, Side::Y, rg);
    CHECK((lx | ly) == full_label_set(rg.l, rg.m));
    const auto point = to_equilibrium_point(res.equilibrium, chicken_game());
    CHECK(is_nash(chicken_game(), point.profile, 1e-9).accepted);
  }
}

TEST_CASE("nondegeneracy detection") {
  SUBCASE("chicken and the prisoners dilemma are nondegenerate") {
    CHECK(is_nondegenerate(RationalBimatrix::from(positivize(chicken_game()))).nondegenerate);
    CHECK(is_nondegenerate(RationalBimatrix::from(positivize(prisoners_dilemma())))
              .nondegenerate);
  }
  SUBCASE("a constant game is degenerate, with a witness vertex") {
    Matrix ones(2, 2, 1.0);
    const auto report = is_nondegenerate(RationalBimatrix::from(BimatrixGame{ones, ones}));
    REQUIRE_FALSE(report.nondegenerate);
    CHECK(report.tight_count > report.expected);
    CHECK_FALSE(report.witness.empty());
  }
  SUBCASE("identical B columns create a coincident vertex") {
    // At x = (1, 0) both payoff columns of B bind on top of x_2 = 0.
    const BimatrixGame g{Matrix{{2, 2}, {1, 1}}, Matrix{{1, 1}, {2, 2}}};
    const auto report = is_nondegenerate(RationalBimatrix::from(g));
    REQUIRE_FALSE(report.nondegenerate);
    CHECK(report.tight_count == 3);
    CHECK(report.expected == 2);
  }
  SUBCASE("a 1x1 positive game is nondegenerate and solves immediately") {
    Matrix one(1, 1, 1.0);
    const auto rg = RationalBimatrix::from(BimatrixGame{one, one});
    CHECK(is_nondegenerate(rg).nondegenerate);
    for (int k : {1, 2}) {
      const auto res = lemke_howson(rg, k);
      CHECK(res.equilibrium.x == RationalVector{Rational(1)});
      CHECK(res.equilibrium.y == RationalVector{Rational(1)});
    }
  }
  SUBCASE("the size guard throws") {
    std::mt19937_64 rng(1);
    const auto big = test::random_integer_game(rng, 11, 2);
    CHECK_THROWS_AS(is_nondegenerate(RationalBimatrix::from(big)), std::invalid_argument);
  }
}

TEST_CASE("lemke-howson on the prisoners dilemma finds (defect, defect) for every label") {
  const auto rg = RationalBimatrix::from(positivize(prisoners_dilemma()));
  for (int k = 1; k <= 4; ++k) {
    const auto res = lemke_howson(rg, k);
    CHECK(res.equilibrium.x == RationalVector{Rational(0), Rational(1)});
    CHECK(res.equilibrium.y == RationalVector{Rational(0), Rational(1)});
    const auto point = to_equilibrium_point(res.equilibrium, prisoners_dilemma());
    CHECK(point.kind == EquilibriumKind::pure);
    CHECK(point.payoffs[0] == doctest::Approx(-2.0));
  }
}

TEST_CASE("lemke-howson on chicken lands in the support-enumeration set for every label") {
  const auto rg = RationalBimatrix::from(positivize(chicken_game()));
  const auto oracle = equilibrium_keys(support_enumeration(RationalBimatrix::from(
      positivize(chicken_game()))));
  for (int k = 1; k <= 4; ++k) {
    const auto res = lemke_howson(rg, k);
    CHECK(oracle.count({res.equilibrium.x, res.equilibrium.y}) == 1);
  }
}

TEST_CASE("lemke-howson path bookkeeping") {
  const auto rg = RationalBimatrix::from(positivize(chicken_game()));
  const auto res = lemke_howson(rg, 2);
  const auto& path = res.path;
  CHECK(path.missing_label == 2);
  CHECK(is_zero(path.x_start));
  CHECK(is_zero(path.y_start));
  CHECK_FALSE(path.steps.empty());
  CHECK(path.steps.back().dropped_label == 2);

  SUBCASE("no vertex pair repeats") {
    std::set<Key> seen;
    seen.insert({path.x_start, path.y_start});
    for (const auto& step : path.steps) CHECK(seen.insert({step.x, step.y}).second);
  }

  SUBCASE("interior pairs are k-almost completely labelled, endpoints complete") {
    const LabelSet full = full_label_set(rg.l, rg.m);
    for (std::size_t s = 0; s < path.steps.size(); ++s) {
      const auto lx = labels_of(path.steps[s].x, Side::X, rg);
      const auto ly = labels_of(path.steps[s].y, Side::Y, rg);
      if (s + 1 == path.steps.size()) {
        CHECK((lx | ly) == full);
      } else {
        LabelSet almost = full;
        almost.bits &= ~(1u << (path.missing_label - 1));
        CHECK((lx | ly).bits == almost.bits);
        CHECK((lx & ly).count() == 1);
      }
    }
  }
}

TEST_CASE("the lemke-howson path is reversible from its endpoint") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const BimatrixGame g = test::random_nondegenerate_game(rng, 3, 3);
    const auto rg = RationalBimatrix::from(positivize(g));
    for (int k = 1; k <= rg.l + rg.m; ++k) {
      detail::TableauPair tabs(rg);
      const auto fwd = detail::follow_path(tabs, k, rg.l, rg.m);
      const auto back = detail::follow_path(tabs, k, rg.l, rg.m);
      CHECK(is_zero(tabs.tx.vertex()));
      CHECK(is_zero(tabs.ty.vertex()));
      CHECK(back.steps.size() == fwd.steps.size());
    }
  }
}

TEST_CASE("label out of range is refused") {
  const auto rg = RationalBimatrix::from(positivize(chicken_game()));
  CHECK_THROWS_AS(lemke_howson(rg, 0), std::invalid_argument);
  CHECK_THROWS_AS(lemke_howson(rg, 5), std::invalid_argument);
}

TEST_CASE("non-positive games are refused by the pivoting entry points") {
  const auto rg = RationalBimatrix::from(chicken_game());
  CHECK_THROWS_AS(lemke_howson(rg, 1), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_equilibria_lh(rg), std::invalid_argument);
}

TEST_CASE("equilibrium enumeration by path restarts") {
  SUBCASE("prisoners dilemma has exactly one equilibrium") {
    const auto res =
        enumerate_equilibria_lh(RationalBimatrix::from(positivize(prisoners_dilemma())));
    REQUIRE(res.equilibria.size() == 1);
    CHECK(res.equilibria[0].x == RationalVector{Rational(0), Rational(1)});
  }
  SUBCASE("chicken has the two pure equilibria plus the 9/10 mixed one") {
    const auto res =
        enumerate_equilibria_lh(RationalBimatrix::from(positivize(chicken_game())));
    REQUIRE(res.equilibria.size() == 3);
    const auto keys = equilibrium_keys(res.equilibria);
    const RationalVector pure_sw{Rational(1), Rational(0)};
    const RationalVector pure_st{Rational(0), Rational(1)};
    const RationalVector mixed{Rational(9, 10), Rational(1, 10)};
    CHECK(keys.count({pure_sw, pure_st}) == 1);
    CHECK(keys.count({pure_st, pure_sw}) == 1);
    CHECK(keys.count({mixed, mixed}) == 1);
  }
  SUBCASE("a symmetric coordination game has one mixed equilibrium at (1/2, 1/2)") {
    const BimatrixGame g{Matrix{{2, 1}, {1, 2}}, Matrix{{1, 2}, {2, 1}}};
    const auto res = enumerate_equilibria_lh(RationalBimatrix::from(g));
    REQUIRE(res.equilibria.size() == 1);
    CHECK(res.equilibria[0].x == RationalVector{Rational(1, 2), Rational(1, 2)});
    CHECK(res.equilibria[0].y == RationalVector{Rational(1, 2), Rational(1, 2)});
  }
  SUBCASE("nondegenerate games never raise the degeneracy warning") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
      const BimatrixGame g = test::random_nondegenerate_game(rng, 3, 3);
      const auto res = enumerate_equilibria_lh(RationalBimatrix::from(positivize(g)));
      CHECK_FALSE(res.degenerate_warning);
    }
  }
  SUBCASE("degenerate ties fall back to lexicographic pivoting with a warning") {
    Matrix ones(2, 2, 1.0);
    const auto res = enumerate_equilibria_lh(RationalBimatrix::from(BimatrixGame{ones, ones}));
    CHECK(res.degenerate_warning);
    CHECK_FALSE(res.equilibria.empty());
    for (const auto& eq : res.equilibria) {
      const auto point = to_equilibrium_point(eq, BimatrixGame{ones, ones});
      CHECK(is_nash(BimatrixGame{ones, ones}, point.profile, 1e-9).accepted);
    }
  }
}

TEST_CASE("support enumeration") {
  SUBCASE("chicken: three equilibria, exactly") {
    const auto eqs = support_enumeration(RationalBimatrix::from(chicken_game()));
    REQUIRE(eqs.size() == 3);
    const auto keys = equilibrium_keys(eqs);
    const RationalVector mixed{Rational(9, 10), Rational(1, 10)};
    CHECK(keys.count({mixed, mixed}) == 1);
    // The mixed equilibrium's value is the indifference payoff -1/10.
    for (const auto& e : eqs)
      if (!e.is_pure()) {
        CHECK(e.payoff1 == Rational(-1, 10));
        CHECK(e.payoff2 == Rational(-1, 10));
      }
  }
  SUBCASE("prisoners dilemma: only (defect, defect)") {
    const auto eqs = support_enumeration(RationalBimatrix::from(prisoners_dilemma()));
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].x == RationalVector{Rational(0), Rational(1)});
    CHECK(eqs[0].payoff1 == Rational(-2));
  }
  SUBCASE("a matched-coordination pair has a unique mixed equilibrium") {
    const BimatrixGame g{Matrix{{2, 1}, {1, 2}}, Matrix{{1, 2}, {2, 1}}};
    const auto eqs = support_enumeration(RationalBimatrix::from(g));
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].x == RationalVector{Rational(1, 2), Rational(1, 2)});
  }
  SUBCASE("the size guard throws") {
    std::mt19937_64 rng(2);
    const auto big = test::random_integer_game(rng, 7, 3);
    CHECK_THROWS_AS(support_enumeration(RationalBimatrix::from(big)), std::invalid_argument);
  }
}

TEST_CASE("parity and sample containment over random nondegenerate games") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> size_d(2, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const int l = size_d(rng), m = size_d(rng);
    const BimatrixGame g = test::random_nondegenerate_game(rng, l, m);
    const auto rg = RationalBimatrix::from(g);
    const auto eqs = support_enumeration(rg);
    CHECK(eqs.size() % 2 == 1);
    const auto oracle = equilibrium_keys(eqs);

    for (const auto& eq : eqs) {
      const auto point = to_equilibrium_point(eq, g);
      CHECK(is_nash(g, point.profile, 1e-9).accepted);
    }

    // Every Lemke-Howson endpoint must appear in the oracle set (the
    // oracle is shift-invariant, so compare strategies).
    for (int k = 1; k <= l + m; ++k) {
      const auto res = lemke_howson(RationalBimatrix::from(positivize(g)), k);
      CHECK(oracle.count({res.equilibrium.x, res.equilibrium.y}) == 1);
    }

    // The LH-reachable component is contained in the full set.
    const auto reach = enumerate_equilibria_lh(RationalBimatrix::from(positivize(g)));
    for (const auto& eq : reach.equilibria)
      CHECK(oracle.count({eq.x, eq.y}) == 1);
  }
}

TEST_CASE("pivoting keeps every visited vertex inside its polytope") {
  // labels_of performs the exact feasibility check and throws on
  // violation, so walking a path and labelling each step verifies
  // feasibility at zero tolerance.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const BimatrixGame g = test::random_nondegenerate_game(rng, 4, 4);
    const auto rg = RationalBimatrix::from(positivize(g));
    for (int k = 1; k <= 8; ++k) {
      const auto res = lemke_howson(rg, k);
      for (const auto& step : res.path.steps) {
        CHECK_NOTHROW(labels_of(step.x, Side::X, rg));
        CHECK_NOTHROW(labels_of(step.y, Side::Y, rg));
      }
    }
  }
}
