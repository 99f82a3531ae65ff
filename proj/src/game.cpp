#include "efpce/game.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace efpce {

namespace {

std::string child_path(const std::string& parent, const std::string& action) {
  return parent == "/" ? "/" + action : parent + "/" + action;
}

bool well_formed_path(const std::string& p) {
  if (p.empty() || p.front() != '/') return false;
  if (p == "/") return true;
  if (p.back() == '/') return false;
  return p.find("//") == std::string::npos;
}

std::string at_line(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

Game Game::build(const GameSpec& spec) {
  Game g;
  g.name_ = spec.name;
  if (spec.players < 1) throw GameError("player count must be positive");
  g.players_ = spec.players;

  // Infosets, renumbered player-major with document order kept per player.
  std::vector<int> order(spec.infosets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return spec.infosets[a].player < spec.infosets[b].player;
  });
  std::vector<int> new_id(spec.infosets.size());
  for (std::size_t k = 0; k < order.size(); ++k) new_id[order[k]] = static_cast<int>(k);
  g.player_begin_.assign(g.players_ + 1, 0);
  for (int id : order) {
    const auto& d = spec.infosets[id];
    if (d.player < 0 || d.player >= g.players_)
      throw GameError(at_line(d.line) + "infoset " + d.label + " has invalid player " +
                      std::to_string(d.player + 1));
    if (d.actions.empty())
      throw GameError(at_line(d.line) + "infoset " + d.label + " has no actions");
    std::set<std::string> seen(d.actions.begin(), d.actions.end());
    if (seen.size() != d.actions.size())
      throw GameError(at_line(d.line) + "infoset " + d.label + " repeats an action");
    if (!g.infoset_by_label_.emplace(d.label, static_cast<int>(g.infosets_.size())).second)
      throw GameError(at_line(d.line) + "duplicate infoset " + d.label);
    Infoset info;
    info.label = d.label;
    info.player = d.player;
    info.actions = d.actions;
    info.children.resize(d.actions.size());
    info.decl_order = id;
    g.infosets_.push_back(std::move(info));
    g.player_begin_[d.player + 1]++;
  }
  for (int p = 0; p < g.players_; ++p) g.player_begin_[p + 1] += g.player_begin_[p];
  g.decl_order_.resize(spec.infosets.size());
  for (std::size_t k = 0; k < spec.infosets.size(); ++k) g.decl_order_[k] = new_id[k];

  g.action_offset_.assign(g.infosets_.size() + 1, 0);
  for (std::size_t i = 0; i < g.infosets_.size(); ++i) {
    g.action_offset_[i + 1] = g.action_offset_[i] + static_cast<int>(g.infosets_[i].actions.size());
    for (std::size_t k = 0; k < g.infosets_[i].actions.size(); ++k)
      g.action_infoset_.push_back(static_cast<int>(i));
  }

  std::unordered_map<std::string, int> decl_by_path;
  for (std::size_t k = 0; k < spec.nodes.size(); ++k) {
    const auto& d = spec.nodes[k];
    if (!well_formed_path(d.path))
      throw GameError(at_line(d.line) + "malformed path '" + d.path + "'");
    if (!decl_by_path.emplace(d.path, static_cast<int>(k)).second)
      throw GameError(at_line(d.line) + "duplicate path " + d.path);
  }
  if (!decl_by_path.count("/")) throw GameError("missing root node '/'");

  // Preorder DFS from the root.
  std::vector<std::vector<int>> seq(g.players_);
  std::vector<Step> steps;
  bool exact = true;
  std::function<int(const std::string&, int, int)> visit = [&](const std::string& path,
                                                              int parent, int incoming) {
    const auto& d = spec.nodes[decl_by_path.at(path)];
    const int id = static_cast<int>(g.nodes_.size());
    g.nodes_.emplace_back();
    g.node_by_path_[path] = id;
    {
      Node& n = g.nodes_.back();
      n.path = path;
      n.parent = parent;
      n.incoming = incoming;
      n.kind = d.kind;
      n.line = d.line;
    }
    std::vector<std::string> actions;
    if (d.kind == NodeKind::kDecision) {
      auto it = g.infoset_by_label_.find(d.infoset);
      if (it == g.infoset_by_label_.end())
        throw GameError(at_line(d.line) + "unknown infoset " + d.infoset);
      const int I = it->second;
      Node& n = g.nodes_[id];
      n.infoset = I;
      n.own_seq = seq[g.infosets_[I].player];
      g.infosets_[I].members.push_back(id);
      actions = g.infosets_[I].actions;
    } else if (d.kind == NodeKind::kChance) {
      if (d.chance.empty()) throw GameError(at_line(d.line) + "chance node without outcomes");
      Node& n = g.nodes_[id];
      for (const auto& [a, p] : d.chance) {
        n.chance_actions.push_back(a);
        n.chance_probs.push_back(p);
        n.chance_probs.back().value.canonicalize();
        exact = exact && p.exact;
      }
      std::set<std::string> seen(n.chance_actions.begin(), n.chance_actions.end());
      if (seen.size() != n.chance_actions.size())
        throw GameError(at_line(d.line) + "chance node " + path + " repeats an outcome");
      actions = n.chance_actions;
    } else {
      if (static_cast<int>(d.payoffs.size()) != g.players_)
        throw GameError(at_line(d.line) + "leaf " + path + " has " +
                        std::to_string(d.payoffs.size()) + " payoffs, expected " +
                        std::to_string(g.players_));
      std::vector<Number> n_payoffs;
      Terminal t;
      t.node = id;
      t.steps = steps;
      t.last_seq.assign(g.players_, -1);
      for (int p = 0; p < g.players_; ++p)
        if (!seq[p].empty()) t.last_seq[p] = seq[p].back();
      for (const auto& s : steps) {
        t.pc *= s.prob;
        t.pc_d *= s.prob_d;
      }
      n_payoffs = d.payoffs;
      for (auto& u : n_payoffs) u.value.canonicalize();
      for (const auto& u : n_payoffs) {
        t.u.push_back(u.value);
        t.u_d.push_back(u.to_double());
        exact = exact && u.exact;
      }
      Node& n = g.nodes_[id];
      n.payoffs = n_payoffs;
      n.terminal = static_cast<int>(g.terminals_.size());
      g.terminals_.push_back(std::move(t));
      return id;
    }

    std::vector<int> kids;
    for (std::size_t k = 0; k < actions.size(); ++k) {
      const std::string cp = child_path(path, actions[k]);
      if (!decl_by_path.count(cp))
        throw GameError(at_line(d.line) + "node " + path + " lacks child for action " +
                        actions[k]);
      Step s;
      s.node = id;
      s.local = static_cast<int>(k);
      if (d.kind == NodeKind::kDecision) {
        const int I = g.nodes_[id].infoset;
        s.infoset = I;
        s.player = g.infosets_[I].player;
        s.action = g.action_id(I, static_cast<int>(k));
        seq[s.player].push_back(s.action);
      } else {
        s.prob = g.nodes_[id].chance_probs[k].value;
        s.prob_d = g.nodes_[id].chance_probs[k].to_double();
      }
      steps.push_back(s);
      kids.push_back(visit(cp, id, static_cast<int>(k)));
      steps.pop_back();
      if (s.player >= 0) seq[s.player].pop_back();
    }
    g.nodes_[id].children = std::move(kids);
    return id;
  };
  visit("/", -1, -1);

  if (g.nodes_.size() != spec.nodes.size()) {
    for (const auto& d : spec.nodes)
      if (!g.node_by_path_.count(d.path))
        throw GameError(at_line(d.line) + "node " + d.path +
                        " is not reachable through its parent's actions");
  }
  g.exact_ = exact;

  for (auto& info : g.infosets_) {
    if (!info.members.empty()) info.own_sequence = g.nodes_[info.members.front()].own_seq;
    info.parent_seq = info.own_sequence.empty() ? -1 : info.own_sequence.back();
  }
  const int n_inf = g.num_infosets();
  for (int K = 0; K < n_inf; ++K) {
    const int ps = g.infosets_[K].parent_seq;
    if (ps >= 0) {
      auto& info = g.infosets_[g.action_infoset(ps)];
      if (info.player == g.infosets_[K].player) info.children[g.action_local(ps)].push_back(K);
    }
  }
  for (int t = 0; t < g.num_terminals(); ++t)
    for (const auto& s : g.terminals_[t].steps)
      if (s.infoset >= 0) g.infosets_[s.infoset].terminals.push_back(t);
  for (auto& info : g.infosets_) {
    std::sort(info.terminals.begin(), info.terminals.end());
    info.terminals.erase(std::unique(info.terminals.begin(), info.terminals.end()),
                         info.terminals.end());
  }

  g.precedes_.assign(static_cast<std::size_t>(n_inf) * n_inf, 0);
  for (int J = 0; J < n_inf; ++J)
    for (int gid : g.infosets_[J].own_sequence) {
      const int I = g.action_infoset(gid);
      if (I != J && g.infosets_[I].player == g.infosets_[J].player)
        g.precedes_[I * n_inf + J] = 1;
    }

  g.topo_.resize(g.players_);
  for (int p = 0; p < g.players_; ++p) {
    auto& v = g.topo_[p];
    for (int I = g.infoset_begin(p); I < g.infoset_end(p); ++I) v.push_back(I);
    std::stable_sort(v.begin(), v.end(), [&](int a, int b) {
      return g.infosets_[a].own_sequence.size() < g.infosets_[b].own_sequence.size();
    });
  }
  return g;
}

std::optional<int> Game::find_node(const std::string& path) const {
  auto it = node_by_path_.find(path);
  if (it == node_by_path_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Game::find_infoset(const std::string& label) const {
  auto it = infoset_by_label_.find(label);
  if (it == infoset_by_label_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Game::find_action(const std::string& label) const {
  for (int gid = 0; gid < num_actions(); ++gid)
    if (action_label(gid) == label) return gid;
  return std::nullopt;
}

std::optional<int> Game::find_terminal(const std::string& path) const {
  auto n = find_node(path);
  if (!n || nodes_[*n].kind != NodeKind::kTerminal) return std::nullopt;
  return nodes_[*n].terminal;
}

InfosetRelation Game::relation(int a, int b) const {
  if (infosets_[a].player != infosets_[b].player)
    throw GameError("infosets " + infosets_[a].label + " and " + infosets_[b].label +
                    " belong to different players");
  if (a == b) return InfosetRelation::kEqual;
  if (precedes(a, b)) return InfosetRelation::kPrecedes;
  if (precedes(b, a)) return InfosetRelation::kFollows;
  return InfosetRelation::kIncomparable;
}

std::vector<int> Game::topo_order_all() const {
  std::vector<int> out;
  for (const auto& v : topo_) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<std::string> validate_game(const Game& game) {
  std::vector<std::string> diags;
  for (const auto& n : game.nodes()) {
    if (n.kind != NodeKind::kChance) continue;
    Rational sum = 0;
    bool exact = true;
    for (const auto& p : n.chance_probs) {
      if (p.value <= 0 || p.value > 1)
        diags.push_back("chance probability " + format_number(p) + " at " + n.path +
                        " is outside (0,1]");
      sum += p.value;
      exact = exact && p.exact;
    }
    const bool ok = exact ? sum == 1 : std::abs(sum.get_d() - 1.0) <= 1e-9;
    if (!ok)
      diags.push_back("chance probabilities at " + n.path + " sum to " +
                      (exact ? format_rational(sum) : format_double(sum.get_d())) + ", not 1");
  }

  std::map<std::string, int> owner;
  for (int I = 0; I < game.num_infosets(); ++I)
    for (const auto& a : game.infoset(I).actions) {
      auto [it, fresh] = owner.emplace(a, I);
      if (!fresh)
        diags.push_back("action label " + a + " appears in infosets " +
                        game.infoset(it->second).label + " and " + game.infoset(I).label);
    }

  for (const int I : game.infosets_in_decl_order()) {
    const auto& info = game.infoset(I);
    if (info.members.empty()) {
      diags.push_back("infoset " + info.label + " has no nodes");
      continue;
    }
    bool recall = true;
    for (int m : info.members) recall = recall && game.node(m).own_seq == info.own_sequence;
    // A member below another member of the same infoset also breaks recall.
    for (int m : info.members)
      for (int gid : game.node(m).own_seq) recall = recall && game.action_infoset(gid) != I;
    if (!recall) diags.push_back("perfect recall violated at " + info.label);
  }
  return diags;
}

std::uint64_t count_strategies(const Game& game, int player) {
  const int lo = player < 0 ? 0 : game.infoset_begin(player);
  const int hi = player < 0 ? game.num_infosets() : game.infoset_end(player);
  std::uint64_t n = 1;
  for (int I = lo; I < hi; ++I) n = saturating_mul(n, game.infoset(I).actions.size());
  return n;
}

namespace {

void check_cap(std::uint64_t count, std::uint64_t cap, const char* what) {
  if (count > cap)
    throw ProfileCapError(std::string(what) + " count " +
                          (count == std::numeric_limits<std::uint64_t>::max()
                               ? std::string("overflow")
                               : std::to_string(count)) +
                          " exceeds cap " + std::to_string(cap));
}

std::vector<std::vector<int>> enumerate_range(const Game& game, int lo, int hi,
                                              std::uint64_t count) {
  std::vector<std::vector<int>> out;
  out.reserve(count);
  std::vector<int> cur(hi - lo, 0);
  for (std::uint64_t k = 0; k < count; ++k) {
    out.push_back(cur);
    for (int pos = hi - lo - 1; pos >= 0; --pos) {
      if (++cur[pos] < static_cast<int>(game.infoset(lo + pos).actions.size())) break;
      cur[pos] = 0;
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> enumerate_strategies(const Game& game, int player,
                                                   std::uint64_t cap) {
  const std::uint64_t n = count_strategies(game, player);
  check_cap(n, cap, "strategy");
  return enumerate_range(game, game.infoset_begin(player), game.infoset_end(player), n);
}

std::vector<PureProfile> enumerate_profiles(const Game& game, std::uint64_t cap) {
  const std::uint64_t n = count_strategies(game, -1);
  check_cap(n, cap, "profile");
  return enumerate_range(game, 0, game.num_infosets(), n);
}

std::uint64_t profile_index(const Game& game, const PureProfile& pi) {
  std::uint64_t idx = 0;
  for (int I = 0; I < game.num_infosets(); ++I)
    idx = idx * game.infoset(I).actions.size() + static_cast<std::uint64_t>(pi[I]);
  return idx;
}

PureProfile profile_at(const Game& game, std::uint64_t index) {
  PureProfile pi(game.num_infosets(), 0);
  for (int I = game.num_infosets() - 1; I >= 0; --I) {
    const auto k = game.infoset(I).actions.size();
    pi[I] = static_cast<int>(index % k);
    index /= k;
  }
  return pi;
}

std::uint64_t strategy_index(const Game& game, int player, const std::vector<int>& s) {
  std::uint64_t idx = 0;
  for (int I = game.infoset_begin(player); I < game.infoset_end(player); ++I)
    idx = idx * game.infoset(I).actions.size() +
          static_cast<std::uint64_t>(s[I - game.infoset_begin(player)]);
  return idx;
}

PureProfile with_strategy(const Game& game, int player, const std::vector<int>& s,
                          PureProfile base) {
  base.resize(game.num_infosets(), 0);
  std::copy(s.begin(), s.end(), base.begin() + game.infoset_begin(player));
  return base;
}

std::vector<int> strategy_of(const Game& game, int player, const PureProfile& pi) {
  return {pi.begin() + game.infoset_begin(player), pi.begin() + game.infoset_end(player)};
}

bool in_subset(const Game& game, int player, const PureProfile& pi, const Selector& sel) {
  auto reaches = [&](int I) {
    for (int gid : game.infoset(I).own_sequence)
      if (!game.plays(pi, gid)) return false;
    return true;
  };
  switch (sel.kind) {
    case Selector::Kind::kPlays:
      return pi[sel.infoset] == sel.local;
    case Selector::Kind::kReaches:
      return reaches(sel.infoset);
    case Selector::Kind::kReachesAndPlays:
      return pi[sel.infoset] == sel.local && reaches(sel.infoset);
    case Selector::Kind::kReachesTerminal:
      for (const auto& s : game.terminal(sel.terminal).steps)
        if (s.player == player && pi[s.infoset] != s.local) return false;
      return true;
  }
  return false;
}

std::vector<std::uint64_t> strategy_subset(const Game& game, int player, const Selector& sel,
                                           std::uint64_t cap) {
  if (sel.kind == Selector::Kind::kReachesTerminal) {
    if (sel.terminal < 0 || sel.terminal >= game.num_terminals())
      throw GameError("selector names an unknown terminal");
  } else {
    if (sel.infoset < 0 || sel.infoset >= game.num_infosets() ||
        game.infoset(sel.infoset).player != player)
      throw GameError("selector infoset does not belong to the player");
    if (sel.kind != Selector::Kind::kReaches &&
        (sel.local < 0 || sel.local >= static_cast<int>(game.infoset(sel.infoset).actions.size())))
      throw GameError("selector action is not available at its infoset");
  }
  std::vector<std::uint64_t> out;
  const auto strategies = enumerate_strategies(game, player, cap);
  PureProfile pi(game.num_infosets(), 0);
  for (std::uint64_t k = 0; k < strategies.size(); ++k) {
    pi = with_strategy(game, player, strategies[k], std::move(pi));
    if (in_subset(game, player, pi, sel)) out.push_back(k);
  }
  return out;
}

std::vector<int> terminal_subset(const Game& game, int infoset, TerminalSet kind, int local) {
  const auto& info = game.infoset(infoset);
  if (kind == TerminalSet::kAll) return info.terminals;
  std::vector<int> out;
  const int gid = game.action_id(infoset, local);
  for (int t : info.terminals) {
    const auto& term = game.terminal(t);
    bool keep = false;
    if (kind == TerminalSet::kThrough) {
      for (const auto& s : term.steps) keep = keep || s.action == gid;
    } else {
      keep = term.last_seq[info.player] == gid;
    }
    if (keep) out.push_back(t);
  }
  return out;
}

}  // namespace efpce

namespace efpce {

bool JointDistribution::exact() const {
  for (const auto& [pi, p] : entries)
    if (!p.exact) return false;
  return true;
}

Rational JointDistribution::total() const {
  Rational s = 0;
  for (const auto& [pi, p] : entries) s += p.value;
  return s;
}

void JointDistribution::sort(const Game& game) {
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    return profile_index(game, a.first) < profile_index(game, b.first);
  });
}

}  // namespace efpce
