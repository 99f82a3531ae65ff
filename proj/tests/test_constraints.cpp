#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "efpce/master.hpp"
#include "support.hpp"

using namespace efpce;
using efpce::test::load_game;

namespace {

// Unperturbed row entry from a direct walk over the tree: the follow value
// on J = I rows minus the deviation payoff of leaves whose last own action
// is (J, b).
Rational walk_entry(const Game& g, const RowIndex& row, const PureProfile& pi) {
  if (pi[row.infoset] != row.action) return 0;
  Rational out = 0;
  if (row.target == row.infoset) out += test::Oracle{g, 0}.trigger_value(pi, row.infoset, pi);
  for (int v = 0; v < g.num_nodes(); ++v) {
    const Node& leaf = g.node(v);
    if (leaf.kind != NodeKind::kTerminal) continue;
    std::vector<int> path;
    for (int x = v; x >= 0; x = g.node(x).parent) path.push_back(x);
    std::reverse(path.begin(), path.end());
    bool through = false;
    int last_infoset = -1, last_local = -1;
    Rational p = 1;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const Node& n = g.node(path[k]);
      const int chosen = g.node(path[k + 1]).incoming;
      if (n.kind == NodeKind::kChance) {
        p *= n.chance_probs[chosen].value;
        continue;
      }
      if (n.infoset == row.infoset) through = true;
      const bool own = g.infoset(n.infoset).player == row.player;
      if (own) {
        last_infoset = n.infoset;
        last_local = chosen;
      }
      if (own && through) continue;
      if (chosen != pi[n.infoset]) p = 0;
    }
    if (!through || last_infoset != row.target || last_local != row.target_action) continue;
    out -= p * leaf.payoffs[row.player].value;
  }
  return out;
}

}  // namespace

TEST_CASE("system dimensions") {
  const Game g = load_game("example1.efg");
  const auto efce = build_efce_system<Rational>(g);
  CHECK(efce.num_rows() == 36);
  CHECK(efce.num_v() == 6);
  CHECK(efce.num_w() == 0);
  CHECK(count_rows(g) == 36);
  const auto pert = build_perturbed_system<Rational>(g, TrembleSchedule::uniform(g), Rational(1, 10));
  CHECK(pert.num_w() == 36);
  CHECK(build_efce_system<double>(load_game("example3.efg")).num_rows() == 24);
}

TEST_CASE("each V column has one +1 group and one -1 entry") {
  const Game g = load_game("example1.efg");
  const auto sys = build_efce_system<Rational>(g);
  for (int c = 0; c < sys.num_v(); ++c) {
    int plus = 0, minus = 0;
    for (const auto& e : sys.b_entries())
      if (e.col == c) (e.value == 1 ? plus : minus) += 1;
    CHECK(plus == static_cast<int>(g.infoset(sys.v_column(c).target).actions.size()));
    CHECK(minus == 1);
  }
}

TEST_CASE("unperturbed A matches the tree walk") {
  for (const char* f : {"example1.efg", "example2.efg", "example3.efg"}) {
    CAPTURE(f);
    const Game g = load_game(f);
    const auto sys = build_efce_system<Rational>(g);
    for (const auto& pi : enumerate_profiles(g)) {
      const auto col = sys.row_value(pi);
      for (int r = 0; r < sys.num_rows(); ++r) CHECK(col[r] == walk_entry(g, sys.row(r), pi));
    }
  }
}

TEST_CASE("A_t at eps = 0 equals A entrywise") {
  const Game g = load_game("example1.efg");
  const auto a = build_efce_system<Rational>(g);
  const auto at = build_perturbed_system<Rational>(g, TrembleSchedule::uniform(g), Rational(0));
  for (const auto& pi : enumerate_profiles(g)) CHECK(a.row_value(pi) == at.row_value(pi));
  REQUIRE(a.b_entries().size() == at.b_entries().size());
  for (std::size_t k = 0; k < a.b_entries().size(); ++k) {
    CHECK(a.b_entries()[k].row == at.b_entries()[k].row);
    CHECK(a.b_entries()[k].value == at.b_entries()[k].value);
  }
  // With η = 0 the W block is -I.
  for (const auto& e : at.c_entries()) {
    CHECK(e.row == e.col);
    CHECK(e.value == -1);
  }
}

TEST_CASE("C_t entries under trembles") {
  const Game g = load_game("example1.efg");
  const Rational eps(1, 10);
  const auto sys = build_perturbed_system<Rational>(g, TrembleSchedule::uniform(g), eps);
  for (const auto& e : sys.c_entries()) {
    const auto& w = sys.row(e.col);
    if (e.row == e.col)
      CHECK(e.value == (w.target == w.infoset ? eps - 1 : Rational(-1)));
    else
      CHECK(e.value == eps);
  }
}

TEST_CASE("unnormalized problem is unbounded and its dual is infeasible") {
  const Game g = load_game("example1.efg");
  const auto sys = build_efce_system<Rational>(g);
  const auto columns = enumerate_profiles(g);

  LPInstance<Rational> primal;
  std::vector<int> mu_vars;
  for (std::size_t k = 0; k < columns.size(); ++k)
    mu_vars.push_back(primal.add_var("mu" + std::to_string(k), Rational(0), std::nullopt, Rational(1)));
  append_block(primal, sys, columns, mu_vars, "");
  const auto p = solve_lp(primal);
  CHECK(p.status == LPStatus::kUnbounded);
  CHECK(check_ray(primal, p.ray));

  // y ≥ 0, Bᵀy = 0, Aᵀy ≤ -1.
  LPInstance<Rational> dual;
  dual.maximize = false;
  for (int r = 0; r < sys.num_rows(); ++r) dual.add_var(sys.row_name(r));
  std::vector<std::vector<std::pair<int, Rational>>> bt(sys.num_v());
  for (const auto& e : sys.b_entries()) bt[e.col].push_back({e.row, e.value});
  for (auto& row : bt) dual.add_row(row, Relation::kEq, Rational(0));
  for (const auto& pi : columns) {
    const auto col = sys.row_value(pi);
    std::vector<std::pair<int, Rational>> coefs;
    for (int r = 0; r < sys.num_rows(); ++r)
      if (col[r] != 0) coefs.push_back({r, col[r]});
    dual.add_row(coefs, Relation::kLe, Rational(-1));
  }
  const auto d = solve_lp(dual);
  CHECK(d.status == LPStatus::kInfeasible);
  CHECK(check_farkas(dual, d.farkas));
}

TEST_CASE("normalized master reaches one") {
  const Game g = load_game("example1.efg");
  const auto sys = build_perturbed_system<Rational>(g, TrembleSchedule::uniform(g), Rational(1, 100));
  const auto m = solve_master<Rational>({&sys}, enumerate_profiles(g));
  CHECK(m.feasible);
  CHECK(m.objective == 1);
  CHECK(m.mu.total() == 1);
  CHECK(dump_lp(build_master<Rational>({&sys}, enumerate_profiles(g))).find("total") !=
        std::string::npos);
}
