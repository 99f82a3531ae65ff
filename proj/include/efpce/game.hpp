#pragma once

// Extensive-form game model. Nodes are identified by their action path from
// the root; infosets are renumbered player-major so that a flat vector of
// per-infoset action choices orders profiles lexicographically.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "efpce/numeric.hpp"

namespace efpce {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProfileCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultProfileCap = 10'000'000;

enum class NodeKind { kDecision, kChance, kTerminal };

/// Unvalidated game records, as read from a file or built in code.
struct GameSpec {
  struct InfosetDecl {
    std::string label;
    int player = 0;  // 0-based
    std::vector<std::string> actions;
    int line = 0;
  };
  struct NodeDecl {
    std::string path;
    NodeKind kind = NodeKind::kTerminal;
    std::string infoset;
    std::vector<std::pair<std::string, Number>> chance;
    std::vector<Number> payoffs;
    int line = 0;
  };
  std::string name = "game";
  int players = 1;
  std::vector<InfosetDecl> infosets;
  std::vector<NodeDecl> nodes;
};

struct Node {
  std::string path;
  int parent = -1;
  int incoming = -1;  // position of this node in the parent's children
  NodeKind kind = NodeKind::kTerminal;
  int infoset = -1;
  std::vector<std::string> chance_actions;
  std::vector<Number> chance_probs;
  std::vector<int> children;  // aligned with the infoset actions or chance_actions
  std::vector<Number> payoffs;
  int terminal = -1;
  std::vector<int> own_seq;  // acting player's own sequence (decision nodes)
  int line = 0;
};

struct Infoset {
  std::string label;
  int player = 0;
  std::vector<std::string> actions;
  std::vector<int> members;
  std::vector<int> own_sequence;  // global action ids, root first
  int parent_seq = -1;            // last entry of own_sequence or -1
  std::vector<std::vector<int>> children;  // C(I,a) per local action
  std::vector<int> terminals;              // Z(I), ascending terminal indices
  int decl_order = 0;
};

/// One edge on a root-to-leaf path.
struct Step {
  int node = -1;
  int player = -1;   // -1 for chance
  int infoset = -1;  // -1 for chance
  int local = -1;    // action position at the node
  int action = -1;   // global action id, -1 for chance
  Rational prob{1};  // chance probability
  double prob_d = 1.0;
};

struct Terminal {
  int node = -1;
  std::vector<Step> steps;
  std::vector<int> last_seq;  // per player: last own global action id, or -1
  std::vector<Rational> u;
  std::vector<double> u_d;
  Rational pc{1};
  double pc_d = 1.0;
};

enum class InfosetRelation { kEqual, kPrecedes, kFollows, kIncomparable };

/// Un-reduced pure profile: local action index at every infoset (player-major).
using PureProfile = std::vector<int>;

class Game {
 public:
  /// Structural assembly; throws GameError on malformed trees. Semantic
  /// invariants (chance sums, perfect recall, ...) are reported by
  /// validate_game instead.
  static Game build(const GameSpec& spec);

  const std::string& name() const { return name_; }
  int num_players() const { return players_; }
  bool exact() const { return exact_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::optional<int> find_node(const std::string& path) const;

  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const Infoset& infoset(int id) const { return infosets_[id]; }
  std::optional<int> find_infoset(const std::string& label) const;
  int infoset_begin(int player) const { return player_begin_[player]; }
  int infoset_end(int player) const { return player_begin_[player + 1]; }
  int num_player_infosets(int player) const {
    return infoset_end(player) - infoset_begin(player);
  }

  int num_actions() const { return static_cast<int>(action_infoset_.size()); }
  int action_id(int infoset, int local) const { return action_offset_[infoset] + local; }
  int action_infoset(int gid) const { return action_infoset_[gid]; }
  int action_local(int gid) const { return gid - action_offset_[action_infoset_[gid]]; }
  const std::string& action_label(int gid) const {
    return infosets_[action_infoset(gid)].actions[action_local(gid)];
  }
  /// Global action id for a label; first match in infoset order.
  std::optional<int> find_action(const std::string& label) const;

  int num_terminals() const { return static_cast<int>(terminals_.size()); }
  const Terminal& terminal(int t) const { return terminals_[t]; }
  std::optional<int> find_terminal(const std::string& path) const;

  bool precedes(int a, int b) const { return precedes_[a * num_infosets() + b] != 0; }
  /// Throws GameError for infosets of different players.
  InfosetRelation relation(int a, int b) const;
  const std::vector<int>& children(int infoset, int local) const {
    return infosets_[infoset].children[local];
  }

  /// Infosets of a player ordered so that ancestors come first.
  const std::vector<int>& topo_order(int player) const { return topo_[player]; }
  /// All infosets, ancestors first within each player.
  std::vector<int> topo_order_all() const;

  /// Document-order labels (pre-renumbering) for serialization.
  const std::vector<int>& infosets_in_decl_order() const { return decl_order_; }

  bool plays(const PureProfile& pi, int gid) const {
    return pi[action_infoset(gid)] == action_local(gid);
  }

 private:
  std::string name_;
  int players_ = 1;
  bool exact_ = true;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> node_by_path_;
  std::vector<Infoset> infosets_;
  std::unordered_map<std::string, int> infoset_by_label_;
  std::vector<int> player_begin_;
  std::vector<int> action_offset_;
  std::vector<int> action_infoset_;
  std::vector<Terminal> terminals_;
  std::vector<char> precedes_;
  std::vector<std::vector<int>> topo_;
  std::vector<int> decl_order_;
};

/// One human-readable diagnostic per violated invariant; empty when valid.
std::vector<std::string> validate_game(const Game& game);

/// Sparse correlation device: profiles in ascending profile-index order.
struct JointDistribution {
  std::vector<std::pair<PureProfile, Number>> entries;

  bool exact() const;
  Rational total() const;
  /// Sorts by profile index and merges nothing; duplicates are a caller bug.
  void sort(const Game& game);
};

// ---- strategy combinatorics ------------------------------------------------

/// Number of pure strategies of a player (product of action counts), or of
/// full profiles when player < 0. Saturates at UINT64_MAX.
std::uint64_t count_strategies(const Game& game, int player);

/// Strategies as local-action vectors over the player's infosets, in
/// lexicographic order (last infoset varies fastest).
std::vector<std::vector<int>> enumerate_strategies(const Game& game, int player,
                                                   std::uint64_t cap = kDefaultProfileCap);
std::vector<PureProfile> enumerate_profiles(const Game& game,
                                            std::uint64_t cap = kDefaultProfileCap);

std::uint64_t profile_index(const Game& game, const PureProfile& pi);
PureProfile profile_at(const Game& game, std::uint64_t index);
std::uint64_t strategy_index(const Game& game, int player, const std::vector<int>& s);
/// Embeds a player's strategy into a profile (other players keep `base`).
PureProfile with_strategy(const Game& game, int player, const std::vector<int>& s,
                          PureProfile base);
std::vector<int> strategy_of(const Game& game, int player, const PureProfile& pi);

struct Selector {
  enum class Kind { kPlays, kReaches, kReachesAndPlays, kReachesTerminal };
  Kind kind = Kind::kPlays;
  int infoset = -1;
  int local = -1;
  int terminal = -1;

  static Selector plays(int infoset, int local) { return {Kind::kPlays, infoset, local, -1}; }
  static Selector reaches(int infoset) { return {Kind::kReaches, infoset, -1, -1}; }
  static Selector reaches_and_plays(int infoset, int local) {
    return {Kind::kReachesAndPlays, infoset, local, -1};
  }
  static Selector reaches_terminal(int terminal) {
    return {Kind::kReachesTerminal, -1, -1, terminal};
  }
};

/// Membership of a profile's player-i part in Π_i(a), Π_i(I), Π_i(I,a), Π_i(z).
bool in_subset(const Game& game, int player, const PureProfile& pi, const Selector& sel);
/// 0-based strategy indices of the subset, ascending. Throws GameError when
/// the selector targets another player's objects.
std::vector<std::uint64_t> strategy_subset(const Game& game, int player, const Selector& sel,
                                           std::uint64_t cap = kDefaultProfileCap);

// ---- terminal sets ---------------------------------------------------------

enum class TerminalSet { kAll, kThrough, kImmediate };
/// Z(I), Z(I,a) or Z⊥(I,a) as ascending terminal indices.
std::vector<int> terminal_subset(const Game& game, int infoset, TerminalSet kind, int local = -1);

}  // namespace efpce
