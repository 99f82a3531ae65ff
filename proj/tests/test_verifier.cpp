#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "efpce/corpus.hpp"
#include "efpce/verifier.hpp"
#include "support.hpp"

using namespace efpce;
using efpce::test::load_dist;
using efpce::test::load_game;
using efpce::test::Oracle;

namespace {

std::vector<Rational> grid_2_to_6() {
  std::vector<Rational> g;
  for (int k = 2; k <= 6; ++k) {
    Rational e(1);
    for (int j = 0; j < k; ++j) e /= 10;
    g.push_back(e);
  }
  return g;
}

JointDistribution random_mu(const Game& g, std::mt19937_64& rng, int size) {
  const auto all = enumerate_profiles(g);
  std::vector<std::pair<PureProfile, long>> picks;
  long total = 0;
  for (int k = 0; k < size; ++k) {
    const auto idx = std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng);
    const long w = std::uniform_int_distribution<long>(1, 5)(rng);
    bool dup = false;
    for (auto& [p, ww] : picks)
      if (p == all[idx]) dup = true;
    if (dup) continue;
    picks.push_back({all[idx], w});
    total += w;
  }
  JointDistribution mu;
  for (auto& [p, w] : picks) mu.entries.push_back({p, Number{Rational(w, total), true}});
  mu.sort(g);
  return mu;
}

BehaviorProfile<Rational> behavior(const Game& g,
                                   const std::vector<std::pair<std::string, Rational>>& first) {
  // Probability of the first action per infoset label; others get the rest.
  BehaviorProfile<Rational> beta(g.num_infosets());
  for (int I = 0; I < g.num_infosets(); ++I) beta[I] = {Rational(1), Rational(0)};
  for (const auto& [label, p] : first) beta[*g.find_infoset(label)] = {p, Rational(1) - p};
  return beta;
}

// Compares every query of an exact perturbed check against the brute-force
// oracle.
void match_oracle(const Game& g, const JointDistribution& mu, const Rational& eps) {
  const Oracle oracle{g, eps};
  const auto rep = perturbed_ne_check(g, mu, TrembleSchedule::uniform(g), eps);
  REQUIRE(rep.exact);
  for (const auto& q : rep.queries) {
    const Rational follow = oracle.follow(mu, q.query.infoset, q.query.action);
    const Rational dev = oracle.best_deviation(mu, q.query.infoset, q.query.action);
    CHECK(q.slack_text == format_rational(follow - dev));
    CHECK(q.deviate == doctest::Approx(dev.get_d()).epsilon(1e-9));
  }
}

}  // namespace

TEST_CASE("fixtures pass the evidence check") {
  const Game g = load_game("example1.efg");
  for (const char* f : {"mu_star.dist", "mu_uniform.dist"}) {
    CAPTURE(f);
    const auto cert = efpce_evidence(g, load_dist(g, f), TrembleSchedule::uniform(g), grid_2_to_6());
    CHECK(cert.verdict == Verdict::kEvidence);
    CHECK(cert.reports.size() == 5);
    CHECK(cert.efce->pass);
  }
}

TEST_CASE("f at K is an EFCE but fails under trembles") {
  const Game g = load_game("example1.efg");
  const auto mu = load_dist(g, "mu_bad.dist");
  CHECK(efce_check(g, mu).pass);
  const Rational eps(1, 1000);
  const auto rep = perturbed_ne_check(g, mu, TrembleSchedule::uniform(g), eps);
  CHECK_FALSE(rep.pass);
  const auto* kf = rep.find(g, "K", "f");
  REQUIRE(kf != nullptr);
  CHECK_FALSE(kf->ok);
  const Oracle oracle{g, eps};
  const int K = *g.find_infoset("K");
  const Rational expected = oracle.follow(mu, K, 1) - oracle.best_deviation(mu, K, 1);
  CHECK(kf->slack_text == format_rational(expected));
  // Frozen from the oracle.
  CHECK(expected == Rational(-499, 1000000000));
  CHECK(rep.text(g).find("condition violated") != std::string::npos);
  CHECK(efpce_evidence(g, mu, TrembleSchedule::uniform(g), grid_2_to_6()).verdict ==
        Verdict::kFailed);
}

TEST_CASE("float mode tolerates rounding but not real violations") {
  const Game g = load_game("example1.efg");
  const auto mu = load_dist(g, "mu_bad.dist");
  VerifyOptions o;
  o.exact = false;
  const auto rep = perturbed_ne_check(g, mu, TrembleSchedule::uniform(g), Rational(1, 100), o);
  CHECK_FALSE(rep.exact);
  CHECK(rep.tolerance == 1e-7);
  CHECK_FALSE(rep.pass);
  CHECK(perturbed_ne_check(g, load_dist(g, "mu_star.dist"), TrembleSchedule::uniform(g),
                           Rational(1, 100), o)
            .pass);
}

TEST_CASE("recommending b at I is refuted") {
  const Game g = load_game("example1.efg");
  const auto mu = test::dist(g, {{"b,c,e,h;m,p", "1"}});
  const auto rep = efce_check(g, mu);
  CHECK_FALSE(rep.pass);
  const auto* ib = rep.find(g, "I", "b");
  REQUIRE(ib != nullptr);
  CHECK(ib->slack <= -0.5);
}

TEST_CASE("dynamic program equals pure-strategy enumeration") {
  const Game g = load_game("example1.efg");
  for (const char* f : {"mu_star.dist", "mu_uniform.dist", "mu_bad.dist"})
    for (const Rational eps : {Rational(0), Rational(1, 1000), Rational(1, 10)}) {
      CAPTURE(f);
      match_oracle(g, load_dist(g, f), eps);
    }
  std::mt19937_64 rng(11);
  for (const Game& h : random_corpus(1000, 25)) {
    CAPTURE(h.name());
    match_oracle(h, random_mu(h, rng, 4), Rational(1, 50));
  }
}

TEST_CASE("the NE-derived distribution with weight on f is not perfect") {
  const Game g = load_game("example1.efg");
  const Rational half(1, 2);
  const auto ne = test::product_distribution(
      g, behavior(g, {{"I", 1}, {"J", half}, {"K", half}, {"L", 0}, {"X", half}, {"Y", 0}}));
  CHECK(efce_check(g, ne).pass);
  CHECK(efpce_evidence(g, ne, TrembleSchedule::uniform(g), grid_2_to_6()).verdict ==
        Verdict::kFailed);
  // Same product with e fixed passes.
  const auto fixed = test::product_distribution(
      g, behavior(g, {{"I", 1}, {"J", half}, {"K", 1}, {"L", 0}, {"X", half}, {"Y", 0}}));
  CHECK(fixed.entries == load_dist(g, "mu_uniform.dist").entries);
  CHECK(efpce_evidence(g, fixed, TrembleSchedule::uniform(g), grid_2_to_6()).verdict ==
        Verdict::kEvidence);
}

TEST_CASE("reports and queries") {
  const Game g = load_game("example1.efg");
  CHECK(all_queries(g).size() == 12);
  const auto rep = efce_check(g, load_dist(g, "mu_star.dist"));
  CHECK(rep.exact);
  CHECK(rep.tolerance == 0);
  CHECK(rep.queries.size() == 12);
  CHECK(rep.text(g).find("verdict: PASS") != std::string::npos);
  CHECK(rep.tsv(g).substr(0, 5) == "query");
  CHECK(std::string(to_string(Verdict::kUnstable)) == "unstable");
  CHECK(support_of(load_dist(g, "mu_star.dist")).size() == 3);
}
