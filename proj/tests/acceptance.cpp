// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "efpce/corpus.hpp"
#include "efpce/trembling.hpp"
#include "support.hpp"

using namespace efpce;
using efpce::test::load_dist;
using efpce::test::load_game;
using efpce::test::Oracle;

namespace {

constexpr std::uint64_t kCorpusSeed = 1000;
constexpr int kCorpusSize = 25;

struct Criterion {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail << what;
      ok = false;
    }
  }
};

std::vector<Rational> grid_2_to_6() {
  std::vector<Rational> g;
  Rational e(1, 100);
  for (int k = 0; k < 5; ++k, e /= 10) g.push_back(e);
  return g;
}

Rational marginal(const Game& g, const JointDistribution& mu, const std::string& infoset,
                  int local) {
  const int I = *g.find_infoset(infoset);
  Rational m = 0;
  for (const auto& [pi, w] : mu.entries)
    if (pi[I] == local) m += w.value;
  return m;
}

struct CorpusRun {
  EfpceResult dense;
  EfpceResult eah;
};

std::vector<CorpusRun>& corpus_runs(const std::vector<Game>& corpus) {
  static std::vector<CorpusRun> runs;
  if (runs.empty())
    for (const Game& g : corpus) {
      HomotopyConfig d, e;
      d.method = Method::kDense;
      e.method = Method::kEah;
      const auto s = TrembleSchedule::uniform(g);
      runs.push_back({solve_efpce(g, s, d), solve_efpce(g, s, e)});
    }
  return runs;
}

Criterion first_example_reproduction() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = std::string(EFPCE_CLI) + " solve --concept efpce --game " +
                          test::data_path("example1.efg") + " --out /tmp/efpce_acceptance_mu.dist" +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "solve exit status ");
  const Game g = load_game("example1.efg");
  JointDistribution mu;
  try {
    mu = parse_distribution(read_file("/tmp/efpce_acceptance_mu.dist"), g);
  } catch (const std::exception& e) {
    c.require(false, std::string("output unreadable: ") + e.what());
    return c;
  }
  const std::pair<const char*, int> want[] = {{"I", 0}, {"Y", 1}, {"K", 0}, {"L", 1}};
  for (const auto& [label, local] : want) {
    const double m = marginal(g, mu, label, local).get_d();
    c.require(std::abs(m - 1) <= 1e-6, std::string("marginal at ") + label + " ");
  }
  c.require(secs < 30, "runtime ");
  c.detail << (c.ok ? "" : "; ") << "runtime " << secs << " s, support " << mu.entries.size();
  return c;
}

Criterion fixture_verification() {
  Criterion c;
  const Game g = load_game("example1.efg");
  const auto s = TrembleSchedule::uniform(g);
  for (const char* f : {"mu_star.dist", "mu_uniform.dist"})
    c.require(efpce_evidence(g, load_dist(g, f), s, grid_2_to_6()).verdict == Verdict::kEvidence,
              std::string(f) + " lacks evidence ");
  const auto bad = load_dist(g, "mu_bad.dist");
  c.require(efce_check(g, bad).pass, "mu_bad fails efce_check ");
  const Rational eps(1, 1000);
  const auto rep = perturbed_ne_check(g, bad, s, eps);
  c.require(!rep.pass, "mu_bad passes the perturbed check ");
  const auto* kf = rep.find(g, "K", "f");
  c.require(kf && !kf->ok && kf->slack < 0, "no negative slack at (K,f) ");
  const Oracle oracle{g, eps};
  const int K = *g.find_infoset("K");
  const Rational brute = oracle.follow(bad, K, 1) - oracle.best_deviation(bad, K, 1);
  c.require(kf && kf->slack_text == format_rational(brute), "slack differs from the oracle ");
  if (kf) c.detail << (c.ok ? "" : "; ") << "slack(K,f) at 1/1000 = " << kf->slack_text;
  return c;
}

Criterion inclusion(const std::vector<Game>& corpus) {
  Criterion c;
  int evidence = 0;
  const auto& runs = corpus_runs(corpus);
  for (std::size_t k = 0; k < corpus.size(); ++k)
    for (const auto* r : {&runs[k].dense, &runs[k].eah}) {
      if (r->certificate.verdict != Verdict::kEvidence) continue;
      ++evidence;
      c.require(efce_check(corpus[k], r->mu).pass, "evidence candidate fails efce_check ");
    }
  c.require(evidence > 0, "no evidence candidates ");

  const Game g = load_game("example1.efg");
  BehaviorProfile<Rational> beta(g.num_infosets(), std::vector<Rational>{1, 0});
  const Rational half(1, 2);
  for (const char* l : {"J", "K", "X"}) beta[*g.find_infoset(l)] = {half, half};
  beta[*g.find_infoset("L")] = {0, 1};
  beta[*g.find_infoset("Y")] = {0, 1};
  const auto ne = test::product_distribution(g, beta);
  const bool ne_fails = efpce_evidence(g, ne, TrembleSchedule::uniform(g), grid_2_to_6()).verdict ==
                        Verdict::kFailed;
  c.require(ne_fails, "NE-derived distribution passes ");
  c.detail << (c.ok ? "" : "; ") << evidence << " evidence candidates pass efce_check";
  return c;
}

Criterion path_equivalence(const std::vector<Game>& corpus) {
  Criterion c;
  long eah_solves = 0;
  const auto& runs = corpus_runs(corpus);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Game& g = corpus[k];
    const auto s = TrembleSchedule::uniform(g);
    const std::string name = g.name() + " ";
    for (const auto* r : {&runs[k].dense, &runs[k].eah}) {
      for (const auto& p : r->path)
        c.require(perturbed_ne_check(g, p.mu, s, p.eps).pass, name + "grid candidate fails ");
      for (const auto& rep : r->certificate.reports)
        c.require(rep.pass, name + "final candidate fails ");
    }
    for (const auto& p : runs[k].eah.path) {
      c.require(p.fallback_reason.empty(), name + "EAH fell back to dense ");
      if (!p.eah) continue;
      ++eah_solves;
      c.require(p.eah->iterations <= p.eah->cap, name + "EAH hit its cap ");
      c.require(p.eah->confirmed_cuts == p.eah->profile_cuts, name + "unconfirmed profile cut ");
    }
  }
  c.detail << (c.ok ? "" : "; ") << eah_solves << " EAH solves";
  return c;
}

Criterion calculus(const std::vector<Game>& corpus) {
  Criterion c;
  std::mt19937_64 rng(5);
  double worst_sum = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Game& g = corpus[trial % corpus.size()];
    const auto s = TrembleSchedule::uniform(g);
    const double e = std::uniform_real_distribution<double>(0, 0.999 * s.eps_max(g))(rng);
    const auto eta = make_eta<double>(g, s, Rational(e));
    PureProfile pi(g.num_infosets());
    for (int I = 0; I < g.num_infosets(); ++I)
      pi[I] = std::uniform_int_distribution<int>(
          0, static_cast<int>(g.infoset(I).actions.size()) - 1)(rng);
    double sum = 0;
    for (int t = 0; t < g.num_terminals(); ++t) sum += reach_xi(g, t, pi, eta);
    worst_sum = std::max(worst_sum, std::abs(sum - 1));
  }
  c.require(worst_sum <= 1e-9, "reach sum ");

  const Game g = load_game("example1.efg");
  const auto a = build_efce_system<Rational>(g);
  const auto at = build_perturbed_system<Rational>(g, TrembleSchedule::uniform(g), Rational(0));
  for (const auto& pi : enumerate_profiles(g))
    c.require(a.row_value(pi) == at.row_value(pi), "A_t(0) differs from A ");

  double worst_dp = 0;
  const auto& runs = corpus_runs(corpus);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Game& h = corpus[k];
    const auto s = TrembleSchedule::uniform(h);
    const Rational eps(1, 100);
    const Oracle oracle{h, eps};
    const auto& mu = runs[k].dense.mu;
    VerifyOptions o;
    o.exact = false;
    const auto rep = perturbed_ne_check(h, mu, s, eps, o);
    for (const auto& q : rep.queries) {
      const double brute = oracle.best_deviation(mu, q.query.infoset, q.query.action).get_d();
      worst_dp = std::max(worst_dp, std::abs(q.deviate - brute));
    }
  }
  c.require(worst_dp <= 1e-9, "DP differs from enumeration ");

  double worst_e = 0;
  long calls = 0;
  for (const auto& r : runs)
    for (const auto& p : r.eah.path)
      if (p.eah) {
        worst_e = std::max(worst_e, p.eah->max_product_error);
        calls += p.eah->oracle_calls;
      }
  c.require(worst_e <= 1e-7, "product postcondition ");
  c.detail << (c.ok ? "" : "; ") << "max |sum-1| " << worst_sum << ", max DP gap " << worst_dp
           << ", max |E| " << worst_e << " over " << calls << " oracle calls";
  return c;
}

Criterion iteration_cap(const std::vector<Game>& corpus) {
  Criterion c;
  long worst = 0, cap = 0;
  for (const auto& r : corpus_runs(corpus))
    for (const auto& p : r.eah.path)
      if (p.eah) {
        c.require(p.eah->iterations <= p.eah->cap, "iterations above cap ");
        if (p.eah->iterations > worst) {
          worst = p.eah->iterations;
          cap = p.eah->cap;
        }
      }
  c.detail << (c.ok ? "" : "; ") << "max iterations " << worst << " (cap " << cap << ")";
  return c;
}

}  // namespace

int main() {
  const auto corpus = random_corpus(kCorpusSeed, kCorpusSize);
  const std::vector<std::pair<const char*, std::function<Criterion()>>> criteria = {
      {"first example reproduction", first_example_reproduction},
      {"fixture verification", fixture_verification},
      {"inclusion properties", [&] { return inclusion(corpus); }},
      {"path equivalence", [&] { return path_equivalence(corpus); }},
      {"calculus invariants", [&] { return calculus(corpus); }},
      {"iteration cap smoke check", [&] { return iteration_cap(corpus); }},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Criterion c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    all = all && c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << k + 1 << " " << criteria[k].first << ": "
              << c.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
