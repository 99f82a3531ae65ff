#pragma once

// Fixture loading and independent reference computations shared by tests.
// Oracles here walk the tree directly and never call the library's reach or
// constraint code.

#include <random>
#include <string>
#include <vector>

#include "efpce/game.hpp"
#include "efpce/game_format.hpp"
#include "efpce/reach.hpp"

namespace efpce::test {

std::string data_path(const std::string& name);
Game load_game(const std::string& name);
JointDistribution load_dist(const Game& game, const std::string& name);
/// "a,c,e,h;m,p" -> profile.
PureProfile profile(const Game& game, const std::string& text);
/// Point masses and small mixtures from text: {"a,c;m", "1/2"}, ...
JointDistribution dist(const Game& game,
                       const std::vector<std::pair<std::string, std::string>>& entries);

/// η(a) = ε for every action; tremble probability of each step.
struct Oracle {
  const Game& game;
  Rational eps;

  /// Probability of reaching terminal node `leaf` when every decision node
  /// plays its infoset's entry of `rec` with probability 1 - (k-1)ε and any
  /// other action with probability ε. Walks parent pointers.
  Rational reach(int leaf_node, const PureProfile& rec) const;

  /// Trigger agent for (I,a): player i follows `pi` until I, then plays
  /// `cont` at every own infoset at or after I. Both players tremble.
  Rational trigger_value(const PureProfile& pi, int infoset, const PureProfile& cont) const;

  /// Following value: trigger_value with cont = pi.
  Rational follow(const JointDistribution& mu, int infoset, int local) const;
  /// max over pure continuations of the player of I.
  Rational best_deviation(const JointDistribution& mu, int infoset, int local) const;
};

/// Product distribution of a behaviour profile (all profiles with positive weight).
JointDistribution product_distribution(const Game& game, const BehaviorProfile<Rational>& beta);

}  // namespace efpce::test
