#pragma once

// Tremble schedules and the perturbed reach-probability calculus.
//
// With lower bounds η, an action c at infoset J is played with probability
// η̃(c) = 1 - Σ_{c'≠c} η(c') when recommended and η(c) otherwise.

#include <stdexcept>
#include <utility>
#include <vector>

#include "efpce/game.hpp"

namespace efpce {

/// η(a)(ε) = coef · ε^degree.
struct Tremble {
  Rational coef{1};
  int degree = 1;
};

class TrembleSchedule {
 public:
  TrembleSchedule() = default;
  /// η(a)(ε) = ε for every action.
  static TrembleSchedule uniform(const Game& game);

  void set(int action, Tremble t);
  const Tremble& at(int action) const { return per_action_[action]; }
  std::size_t size() const { return per_action_.size(); }

  /// True when 0 ≤ ε and Σ_{a∈A(I)} η(a)(ε) < 1 at every infoset.
  bool valid(const Game& game, const Rational& eps) const;
  /// Supremum of valid ε (bisection, relative precision 1e-12).
  double eps_max(const Game& game) const;

 private:
  std::vector<Tremble> per_action_;
};

class EpsilonRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Tremble values frozen at one ε.
template <class T>
struct EtaTable {
  T eps{0};
  std::vector<T> eta;    // per global action
  std::vector<T> slack;  // per infoset: 1 - Σ_{a∈A(I)} η(a)

  /// Probability of action `gid` at infoset `infoset` given whether it is recommended.
  T factor(int infoset, int gid, bool recommended) const {
    if (recommended) return T(eta[gid] + slack[infoset]);
    return eta[gid];
  }
};

/// Throws EpsilonRangeError outside the schedule's validity range.
template <class T>
EtaTable<T> make_eta(const Game& game, const TrembleSchedule& schedule, const Rational& eps);

/// Per-infoset distribution over local actions.
template <class T>
using BehaviorProfile = std::vector<std::vector<T>>;

template <class T>
BehaviorProfile<T> uniform_behavior(const Game& game);
template <class T>
BehaviorProfile<T> pure_behavior(const Game& game, const PureProfile& pi);

enum class XiVariant {
  kFull,          // every step, with chance
  kFrom,          // excludes the owner of I's steps at or after I
  kContinuation,  // only the owner of I's steps at or after I; no chance
};

/// ξ^η(z,π) and its two partial products.
template <class T>
T reach_xi(const Game& game, int terminal, const PureProfile& pi, const EtaTable<T>& eta,
           XiVariant variant = XiVariant::kFull, int infoset = -1);

/// Continuation factor for a behavioural continuation of I's owner.
template <class T>
T continuation_xi(const Game& game, int terminal, int infoset, const BehaviorProfile<T>& beta,
                  const EtaTable<T>& eta);

template <class T>
std::vector<std::pair<const PureProfile*, T>> weights(const JointDistribution& mu);

/// q^η_μ(z) = Σ_π ξ^η(z,π)μ(π).
template <class T>
T follow_reach_q(const Game& game, const JointDistribution& mu, const EtaTable<T>& eta,
                 int terminal);

/// Unperturbed q_μ(z) = Σ_{π∈Π(z)} p_c(z)μ(π).
template <class T>
T q_mu(const Game& game, const JointDistribution& mu, int terminal);

template <class T>
struct TriggerReach {
  T p{0};
  T y{0};
};

/// p and y of an (I,a) trigger agent with a behavioural continuation of I's
/// owner (pure continuations are point-mass behaviours).
template <class T>
TriggerReach<T> trigger_reach(const Game& game, const JointDistribution& mu,
                              const BehaviorProfile<T>& continuation, int infoset, int local,
                              const EtaTable<T>& eta, int terminal);

}  // namespace efpce
