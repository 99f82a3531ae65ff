#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "efpce/game_format.hpp"
#include "support.hpp"

using namespace efpce;
using efpce::test::load_game;

TEST_CASE("first example game structure") {
  const Game g = load_game("example1.efg");
  CHECK(g.num_players() == 2);
  CHECK(g.num_nodes() == 15);
  CHECK(g.num_infosets() == 6);
  CHECK(g.num_terminals() == 8);
  CHECK(count_strategies(g, 0) == 16);
  CHECK(count_strategies(g, 1) == 4);
  CHECK(count_strategies(g, -1) == 64);

  const int I = *g.find_infoset("I"), J = *g.find_infoset("J"), K = *g.find_infoset("K");
  const int L = *g.find_infoset("L"), X = *g.find_infoset("X");
  CHECK(g.infoset(J).members.size() == 2);
  CHECK(g.precedes(I, J));
  CHECK(g.precedes(I, K));
  CHECK_FALSE(g.precedes(J, K));
  CHECK(g.relation(K, L) == InfosetRelation::kIncomparable);
  CHECK(g.relation(J, I) == InfosetRelation::kFollows);
  CHECK_THROWS_AS(g.relation(I, X), GameError);
  CHECK(g.children(I, 0) == std::vector<int>{J});
  CHECK(g.children(I, 1) == std::vector<int>{K, L});
}

TEST_CASE("strategy subsets on the first example") {
  const Game g = load_game("example1.efg");
  const int K = *g.find_infoset("K");
  const int I = *g.find_infoset("I");
  // 0-based indices; strategies are ordered I, J, K, L with L fastest.
  CHECK(strategy_subset(g, 0, Selector::reaches_and_plays(K, 1)) ==
        std::vector<std::uint64_t>{10, 11, 14, 15});
  CHECK(strategy_subset(g, 0, Selector::reaches(K)).size() == 8);
  CHECK(strategy_subset(g, 0, Selector::plays(I, 0)).size() == 8);
  CHECK_THROWS_AS(strategy_subset(g, 1, Selector::plays(I, 0)), GameError);
  // Π_i(I,a) ⊆ Π_i(I) on every infoset.
  for (int J = g.infoset_begin(0); J < g.infoset_end(0); ++J) {
    const auto reach = strategy_subset(g, 0, Selector::reaches(J));
    for (int a = 0; a < 2; ++a)
      for (auto s : strategy_subset(g, 0, Selector::reaches_and_plays(J, a)))
        CHECK(std::find(reach.begin(), reach.end(), s) != reach.end());
  }
}

TEST_CASE("profile indexing round trips") {
  const Game g = load_game("example1.efg");
  const auto all = enumerate_profiles(g);
  REQUIRE(all.size() == 64);
  for (std::uint64_t k = 0; k < all.size(); ++k) {
    CHECK(profile_index(g, all[k]) == k);
    CHECK(profile_at(g, k) == all[k]);
  }
  CHECK_THROWS_AS(enumerate_profiles(g, 10), ProfileCapError);
}

TEST_CASE("terminal subsets") {
  const Game g = load_game("example3.efg");
  const int I = *g.find_infoset("I");
  CHECK(terminal_subset(g, I, TerminalSet::kAll).size() == 5);
  CHECK(terminal_subset(g, I, TerminalSet::kThrough, 0).size() == 4);
  CHECK(terminal_subset(g, I, TerminalSet::kImmediate, 0).empty());
  CHECK(terminal_subset(g, I, TerminalSet::kImmediate, 1).size() == 1);
  CHECK(g.children(I, 0).size() == 2);
}

TEST_CASE("other fixtures") {
  CHECK(count_strategies(load_game("example2.efg"), -1) == 8);
  CHECK(count_strategies(load_game("single_leaf.efg"), -1) == 1);
  CHECK(count_strategies(load_game("example3.efg"), -1) == 16);
}

TEST_CASE("validation diagnostics") {
  auto diags = [](const char* text) { return validate_game(parse_game_unchecked(text)); };
  CHECK(diags("game g players=1\nchance / x:1/2 y:1/3\nleaf /x payoffs=0\nleaf /y payoffs=0\n")
            .front()
            .find("sum to 5/6") != std::string::npos);
  CHECK(diags("game g players=1\ninfoset A player=1 actions=a,b\ninfoset B player=1 actions=a,c\n"
              "node / infoset=A\nleaf /a payoffs=0\nnode /b infoset=B\nleaf /b/a payoffs=0\n"
              "leaf /b/c payoffs=0\n")
            .front()
            .find("action label a appears in infosets") != std::string::npos);
  CHECK(diags("game g players=1\ninfoset A player=1 actions=a,b\ninfoset Z player=1 actions=z\n"
              "node / infoset=A\nleaf /a payoffs=0\nleaf /b payoffs=0\n")
            .front() == "infoset Z has no nodes");
  // Player 1 forgets her own first move.
  CHECK(diags("game g players=1\ninfoset A player=1 actions=a,b\ninfoset B player=1 actions=c,d\n"
              "node / infoset=A\nnode /a infoset=B\nnode /b infoset=B\nleaf /a/c payoffs=0\n"
              "leaf /a/d payoffs=0\nleaf /b/c payoffs=0\nleaf /b/d payoffs=0\n")
            .front() == "perfect recall violated at B");
  CHECK(diags("game g players=1\nleaf / payoffs=0\n").empty());
}
