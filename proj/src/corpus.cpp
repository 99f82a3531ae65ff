#include "efpce/corpus.hpp"

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

namespace efpce {

namespace {

class Builder {
 public:
  Builder(std::uint64_t seed, const CorpusOptions& o) : rng_(seed), o_(o) {
    spec_.name = "random" + std::to_string(seed);
    spec_.players = o.players;
  }

  GameSpec run() {
    std::vector<std::vector<int>> seqs(o_.players);
    grow("/", 0, seqs);
    return std::move(spec_);
  }

 private:
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  static std::string child(const std::string& path, const std::string& label) {
    return path == "/" ? "/" + label : path + "/" + label;
  }

  void leaf(const std::string& path) {
    GameSpec::NodeDecl n;
    n.path = path;
    n.kind = NodeKind::kTerminal;
    for (int p = 0; p < o_.players; ++p) n.payoffs.push_back(Number{Rational(uniform(0, o_.payoff_max)), true});
    spec_.nodes.push_back(std::move(n));
  }

  // seqs: per player, own global action ids on the path (labels are unique).
  void grow(const std::string& path, int depth, std::vector<std::vector<int>>& seqs) {
    if (depth >= o_.max_depth || (depth > 0 && coin(o_.leaf_probability))) {
      leaf(path);
      return;
    }
    if (depth > 0 && coin(o_.chance_probability)) {
      GameSpec::NodeDecl n;
      n.path = path;
      n.kind = NodeKind::kChance;
      const int k = ++chance_count_;
      Rational w(uniform(1, 3), 4);
      w.canonicalize();
      n.chance.push_back({"c" + std::to_string(k) + "x", Number{w, true}});
      n.chance.push_back({"c" + std::to_string(k) + "y", Number{1 - w, true}});
      const auto outcomes = n.chance;
      spec_.nodes.push_back(std::move(n));
      for (const auto& [label, prob] : outcomes) grow(child(path, label), depth + 1, seqs);
      return;
    }
    const int player = uniform(0, o_.players - 1);
    const int actions = o_.max_actions <= 1 ? 1 : uniform(coin(0.1) ? 1 : 2, o_.max_actions);
    const auto key = std::make_tuple(player, seqs[player], actions);
    int infoset = -1;
    auto it = open_.find(key);
    if (it != open_.end() && coin(o_.merge_probability)) {
      infoset = it->second;
    } else {
      infoset = static_cast<int>(spec_.infosets.size());
      GameSpec::InfosetDecl d;
      d.label = "I" + std::to_string(infoset);
      d.player = player;
      for (int a = 0; a < actions; ++a)
        d.actions.push_back("a" + std::to_string(infoset) + (actions == 1 ? "" : std::string(1, 'a' + a)));
      spec_.infosets.push_back(std::move(d));
      first_action_.push_back(action_count_);
      action_count_ += actions;
      open_[key] = infoset;
    }
    GameSpec::NodeDecl n;
    n.path = path;
    n.kind = NodeKind::kDecision;
    n.infoset = spec_.infosets[infoset].label;
    spec_.nodes.push_back(std::move(n));
    const auto labels = spec_.infosets[infoset].actions;
    for (int a = 0; a < actions; ++a) {
      seqs[player].push_back(first_action_[infoset] + a);
      grow(child(path, labels[a]), depth + 1, seqs);
      seqs[player].pop_back();
    }
  }

  std::mt19937_64 rng_;
  CorpusOptions o_;
  GameSpec spec_;
  std::map<std::tuple<int, std::vector<int>, int>, int> open_;
  std::vector<int> first_action_;
  int action_count_ = 0;
  int chance_count_ = 0;
};

}  // namespace

GameSpec random_game_spec(std::uint64_t seed, const CorpusOptions& options) {
  if (options.players < 1 || options.max_depth < 1 || options.max_actions < 1)
    throw std::invalid_argument("corpus options out of range");
  return Builder(seed, options).run();
}

Game random_game(std::uint64_t seed, const CorpusOptions& options) {
  Game g = Game::build(random_game_spec(seed, options));
  const auto issues = validate_game(g);
  if (!issues.empty()) throw GameError("generated game is invalid: " + issues.front());
  return g;
}

std::vector<Game> random_corpus(std::uint64_t base_seed, int count, const CorpusOptions& options) {
  std::vector<Game> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(random_game(base_seed + k, options));
  return out;
}

}  // namespace efpce
