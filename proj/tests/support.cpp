#include "support.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

namespace efpce::test {

std::string data_path(const std::string& name) { return std::string(EFPCE_TEST_DATA) + "/" + name; }

Game load_game(const std::string& name) { return parse_game(read_file(data_path(name))); }

JointDistribution load_dist(const Game& game, const std::string& name) {
  return parse_distribution(read_file(data_path(name)), game);
}

PureProfile profile(const Game& game, const std::string& text) {
  return parse_distribution("mu " + text + " 1\n", game).entries.at(0).first;
}

JointDistribution dist(const Game& game,
                       const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string text;
  for (const auto& [p, w] : entries) text += "mu " + p + " " + w + "\n";
  return parse_distribution(text, game);
}

Rational Oracle::trigger_value(const PureProfile& pi, int infoset, const PureProfile& cont) const {
  const int owner = game.infoset(infoset).player;
  Rational total = 0;
  for (int v = 0; v < game.num_nodes(); ++v) {
    const Node& leaf = game.node(v);
    if (leaf.kind != NodeKind::kTerminal) continue;
    // Collect the root-to-leaf path.
    std::vector<int> path;
    for (int x = v; x >= 0; x = game.node(x).parent) path.push_back(x);
    std::reverse(path.begin(), path.end());
    bool through = false;
    Rational p = 1;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const Node& n = game.node(path[k]);
      const int chosen = game.node(path[k + 1]).incoming;
      if (n.kind == NodeKind::kChance) {
        p *= n.chance_probs[chosen].value;
        continue;
      }
      if (n.infoset == infoset) through = true;
      const auto& info = game.infoset(n.infoset);
      const bool switched = through && info.player == owner;
      const int rec = switched ? cont[n.infoset] : pi[n.infoset];
      const long k_actions = static_cast<long>(info.actions.size());
      p *= chosen == rec ? Rational(1) - Rational(k_actions - 1) * eps : eps;
    }
    if (!through) continue;
    total += p * leaf.payoffs[owner].value;
  }
  return total;
}

Rational Oracle::reach(int leaf_node, const PureProfile& rec) const {
  Rational p = 1;
  for (int x = leaf_node; game.node(x).parent >= 0; x = game.node(x).parent) {
    const Node& n = game.node(game.node(x).parent);
    const int chosen = game.node(x).incoming;
    if (n.kind == NodeKind::kChance) {
      p *= n.chance_probs[chosen].value;
    } else {
      const long k = static_cast<long>(game.infoset(n.infoset).actions.size());
      p *= chosen == rec[n.infoset] ? Rational(1) - Rational(k - 1) * eps : eps;
    }
  }
  return p;
}

Rational Oracle::follow(const JointDistribution& mu, int infoset, int local) const {
  Rational total = 0;
  for (const auto& [pi, w] : mu.entries)
    if (pi[infoset] == local) total += w.value * trigger_value(pi, infoset, pi);
  return total;
}

Rational Oracle::best_deviation(const JointDistribution& mu, int infoset, int local) const {
  const int owner = game.infoset(infoset).player;
  std::vector<int> own;
  for (int I = 0; I < game.num_infosets(); ++I)
    if (game.infoset(I).player == owner) own.push_back(I);
  PureProfile cont(game.num_infosets(), 0);
  std::optional<Rational> best;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == own.size()) {
      Rational v = 0;
      for (const auto& [pi, w] : mu.entries)
        if (pi[infoset] == local) v += w.value * trigger_value(pi, infoset, cont);
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t a = 0; a < game.infoset(own[k]).actions.size(); ++a) {
      cont[own[k]] = static_cast<int>(a);
      rec(k + 1);
    }
  };
  rec(0);
  return *best;
}

JointDistribution product_distribution(const Game& game, const BehaviorProfile<Rational>& beta) {
  JointDistribution mu;
  PureProfile pi(game.num_infosets(), 0);
  std::function<void(int, Rational)> rec = [&](int I, Rational w) {
    if (w == 0) return;
    if (I == game.num_infosets()) {
      mu.entries.push_back({pi, Number{w, true}});
      return;
    }
    for (std::size_t a = 0; a < beta[I].size(); ++a) {
      pi[I] = static_cast<int>(a);
      rec(I + 1, w * beta[I][a]);
    }
  };
  rec(0, 1);
  mu.sort(game);
  return mu;
}

}  // namespace efpce::test
