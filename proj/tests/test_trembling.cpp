#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "efpce/game_format.hpp"
#include "efpce/trembling.hpp"
#include "support.hpp"

using namespace efpce;
using efpce::test::load_game;

namespace {

// Mass of profiles that play `action` at `infoset`.
Rational marginal(const Game& g, const JointDistribution& mu, const std::string& infoset,
                  const std::string& action) {
  const int I = *g.find_infoset(infoset);
  const auto& acts = g.infoset(I).actions;
  const int a = static_cast<int>(std::find(acts.begin(), acts.end(), action) - acts.begin());
  Rational m = 0;
  for (const auto& [pi, w] : mu.entries)
    if (pi[I] == a) m += w.value;
  return m;
}

}  // namespace

TEST_CASE("first example: dense and ellipsoid paths") {
  const Game g = load_game("example1.efg");
  for (const Method method : {Method::kDense, Method::kEah}) {
    CAPTURE(to_string(method));
    HomotopyConfig cfg;
    cfg.method = method;
    const auto r = solve_efpce(g, TrembleSchedule::uniform(g), cfg);
    CHECK(r.certificate.verdict == Verdict::kEvidence);
    CHECK(r.mu.total() == 1);
    CHECK(marginal(g, r.mu, "I", "a") == 1);
    CHECK(marginal(g, r.mu, "Y", "p") == 1);
    CHECK(marginal(g, r.mu, "K", "e") == 1);
    CHECK(marginal(g, r.mu, "L", "h") == 1);
    CHECK(r.certificate.stabilized_at >= 0);
    for (const auto& p : r.path) CHECK(p.fallback_reason.empty());
  }
}

TEST_CASE("efce solve") {
  const Game g = load_game("example1.efg");
  const auto r = solve_efce(g);
  CHECK(r.report.pass);
  CHECK(r.mu.total() == 1);
  HomotopyConfig cfg;
  cfg.method = Method::kEah;
  CHECK(solve_efce(g, cfg).report.pass);
}

TEST_CASE("single-profile game") {
  const Game g = load_game("single_leaf.efg");
  const auto r = solve_efpce(g, TrembleSchedule::uniform(g));
  CHECK(r.certificate.verdict == Verdict::kEvidence);
  REQUIRE(r.mu.entries.size() == 1);
  CHECK(r.mu.entries[0].second.value == 1);
}

TEST_CASE("other fixtures") {
  for (const char* f : {"example2.efg", "example3.efg"}) {
    CAPTURE(f);
    const Game g = load_game(f);
    const auto r = solve_efpce(g, TrembleSchedule::uniform(g));
    CHECK(r.certificate.verdict == Verdict::kEvidence);
    CHECK(r.certificate.efce->pass);
  }
}

TEST_CASE("solves are deterministic") {
  const Game g = load_game("example1.efg");
  const auto a = solve_efpce(g, TrembleSchedule::uniform(g));
  const auto b = solve_efpce(g, TrembleSchedule::uniform(g));
  CHECK(serialize_distribution(a.mu, g) == serialize_distribution(b.mu, g));
  CHECK(a.certificate.text(g) == b.certificate.text(g));
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("1e-2, 1e-3,1/10000");
  REQUIRE(g.size() == 3);
  CHECK(g[0] == Rational(1, 100));
  CHECK(g[2] == Rational(1, 10000));
  const auto geo = parse_grid("geo(1/10,1/10,4)");
  REQUIRE(geo.size() == 4);
  CHECK(geo[3] == Rational(1, 10000));
  CHECK(HomotopyConfig::default_grid().size() == 8);
  CHECK_THROWS_AS(parse_grid("1e-3,1e-2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0,1e-2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("geo(1,2)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
  CHECK(parse_method("eah") == Method::kEah);
  CHECK_THROWS_AS(parse_method("simplex"), std::invalid_argument);
}

TEST_CASE("configuration validation") {
  const Game g = load_game("example1.efg");
  HomotopyConfig cfg;
  cfg.window = 1;
  CHECK_THROWS_AS(solve_efpce(g, TrembleSchedule::uniform(g), cfg), std::invalid_argument);
  cfg.window = 3;
  cfg.grid = {Rational(1, 2), Rational(1, 10), Rational(1, 100)};
  CHECK_THROWS_AS(solve_efpce(g, TrembleSchedule::uniform(g), cfg), EpsilonRangeError);
}

TEST_CASE("a grid too short to stabilize is reported as unstable") {
  const Game g = load_game("example1.efg");
  HomotopyConfig cfg;
  cfg.grid = {Rational(1, 100), Rational(1, 1000)};
  const auto r = solve_efpce(g, TrembleSchedule::uniform(g), cfg);
  CHECK(r.certificate.verdict == Verdict::kUnstable);
  CHECK(r.certificate.stabilized_at == -1);
}

TEST_CASE("custom tremble schedule") {
  const Game g = load_game("example1.efg");
  auto s = TrembleSchedule::uniform(g);
  s.set(*g.find_action("f"), Tremble{Rational(2), 2});
  const auto r = solve_efpce(g, s);
  CHECK(r.certificate.verdict == Verdict::kEvidence);
  CHECK(marginal(g, r.mu, "I", "a") == 1);
}
