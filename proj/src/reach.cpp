#include "efpce/reach.hpp"

#include <cmath>

namespace efpce {

TrembleSchedule TrembleSchedule::uniform(const Game& game) {
  TrembleSchedule s;
  s.per_action_.assign(game.num_actions(), Tremble{});
  return s;
}

void TrembleSchedule::set(int action, Tremble t) {
  if (t.coef <= 0 || t.degree < 1)
    throw std::invalid_argument("tremble needs coefficient > 0 and degree >= 1");
  per_action_.at(action) = std::move(t);
}

bool TrembleSchedule::valid(const Game& game, const Rational& eps) const {
  if (eps < 0) return false;
  for (int I = 0; I < game.num_infosets(); ++I) {
    Rational sum = 0;
    for (std::size_t k = 0; k < game.infoset(I).actions.size(); ++k) {
      const auto& t = per_action_[game.action_id(I, static_cast<int>(k))];
      sum += t.coef * power<Rational>(eps, t.degree);
    }
    if (sum >= 1) return false;
  }
  return true;
}

double TrembleSchedule::eps_max(const Game& game) const {
  auto ok = [&](double e) { return valid(game, Rational(e)); };
  if (game.num_infosets() == 0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (ok(hi) && hi < 1e6) hi *= 2;
  for (int k = 0; k < 60 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

template <class T>
EtaTable<T> make_eta(const Game& game, const TrembleSchedule& schedule, const Rational& eps) {
  if (!schedule.valid(game, eps))
    throw EpsilonRangeError("epsilon " + format_rational(eps) +
                            " is outside the tremble schedule's validity range");
  EtaTable<T> tab;
  tab.eps = convert<T>(eps);
  tab.eta.resize(game.num_actions());
  tab.slack.resize(game.num_infosets());
  for (int I = 0; I < game.num_infosets(); ++I) {
    Rational sum = 0;
    for (std::size_t k = 0; k < game.infoset(I).actions.size(); ++k) {
      const int gid = game.action_id(I, static_cast<int>(k));
      const auto& t = schedule.at(gid);
      const Rational e = t.coef * power<Rational>(eps, t.degree);
      tab.eta[gid] = convert<T>(e);
      sum += e;
    }
    tab.slack[I] = convert<T>(Rational(1 - sum));
  }
  return tab;
}

template <class T>
BehaviorProfile<T> uniform_behavior(const Game& game) {
  BehaviorProfile<T> b(game.num_infosets());
  for (int I = 0; I < game.num_infosets(); ++I) {
    const auto n = game.infoset(I).actions.size();
    b[I].assign(n, T(1) / T(static_cast<long>(n)));
  }
  return b;
}

template <class T>
BehaviorProfile<T> pure_behavior(const Game& game, const PureProfile& pi) {
  BehaviorProfile<T> b(game.num_infosets());
  for (int I = 0; I < game.num_infosets(); ++I) {
    b[I].assign(game.infoset(I).actions.size(), T(0));
    b[I][pi[I]] = 1;
  }
  return b;
}

namespace {

int step_at(const Game& game, int terminal, int infoset) {
  const auto& steps = game.terminal(terminal).steps;
  for (std::size_t k = 0; k < steps.size(); ++k)
    if (steps[k].infoset == infoset) return static_cast<int>(k);
  throw std::invalid_argument("terminal " + game.node(game.terminal(terminal).node).path +
                              " is not below infoset " + game.infoset(infoset).label);
}

template <class T>
T chance_prob(const Step& s) {
  if constexpr (kIsExact<T>) {
    return s.prob;
  } else {
    return s.prob_d;
  }
}

}  // namespace

template <class T>
T reach_xi(const Game& game, int terminal, const PureProfile& pi, const EtaTable<T>& eta,
           XiVariant variant, int infoset) {
  const auto& steps = game.terminal(terminal).steps;
  int cut = static_cast<int>(steps.size());
  int owner = -1;
  if (variant != XiVariant::kFull) {
    cut = step_at(game, terminal, infoset);
    owner = game.infoset(infoset).player;
  }
  T prob = 1;
  for (int k = 0; k < static_cast<int>(steps.size()); ++k) {
    const Step& s = steps[k];
    const bool excluded = k >= cut && s.player == owner;
    if (variant == XiVariant::kContinuation) {
      if (!excluded) continue;
    } else if (excluded) {
      continue;
    }
    if (s.player < 0) {
      prob *= chance_prob<T>(s);
    } else {
      prob *= eta.factor(s.infoset, s.action, pi[s.infoset] == s.local);
    }
  }
  return prob;
}

template <class T>
T continuation_xi(const Game& game, int terminal, int infoset, const BehaviorProfile<T>& beta,
                  const EtaTable<T>& eta) {
  const auto& steps = game.terminal(terminal).steps;
  const int cut = step_at(game, terminal, infoset);
  const int owner = game.infoset(infoset).player;
  T prob = 1;
  for (int k = cut; k < static_cast<int>(steps.size()); ++k) {
    const Step& s = steps[k];
    if (s.player != owner) continue;
    prob *= T(eta.eta[s.action] + beta[s.infoset][s.local] * eta.slack[s.infoset]);
  }
  return prob;
}

template <class T>
std::vector<std::pair<const PureProfile*, T>> weights(const JointDistribution& mu) {
  std::vector<std::pair<const PureProfile*, T>> out;
  out.reserve(mu.entries.size());
  for (const auto& [pi, p] : mu.entries) {
    out.emplace_back(&pi, convert<T>(p.value));
    if constexpr (kIsExact<T>) out.back().second.canonicalize();
  }
  return out;
}

template <class T>
T follow_reach_q(const Game& game, const JointDistribution& mu, const EtaTable<T>& eta,
                 int terminal) {
  T q = 0;
  for (const auto& [pi, w] : weights<T>(mu)) q += reach_xi(game, terminal, *pi, eta) * w;
  return q;
}

template <class T>
T q_mu(const Game& game, const JointDistribution& mu, int terminal) {
  const auto& term = game.terminal(terminal);
  T q = 0;
  for (const auto& [pi, w] : weights<T>(mu)) {
    bool reach = true;
    for (const auto& s : term.steps)
      if (s.player >= 0 && (*pi)[s.infoset] != s.local) reach = false;
    if (reach) q += w;
  }
  if constexpr (kIsExact<T>) {
    return q * term.pc;
  } else {
    return q * term.pc_d;
  }
}

template <class T>
TriggerReach<T> trigger_reach(const Game& game, const JointDistribution& mu,
                              const BehaviorProfile<T>& continuation, int infoset, int local,
                              const EtaTable<T>& eta, int terminal) {
  TriggerReach<T> r;
  T activated = 0;
  T idle = 0;
  for (const auto& [pi, w] : weights<T>(mu)) {
    if ((*pi)[infoset] == local) {
      activated += reach_xi(game, terminal, *pi, eta, XiVariant::kFrom, infoset) * w;
    } else {
      idle += reach_xi(game, terminal, *pi, eta) * w;
    }
  }
  r.p = activated * continuation_xi(game, terminal, infoset, continuation, eta);
  r.y = r.p + idle;
  return r;
}

#define EFPCE_INSTANTIATE(T)                                                                   \
  template EtaTable<T> make_eta<T>(const Game&, const TrembleSchedule&, const Rational&);      \
  template BehaviorProfile<T> uniform_behavior<T>(const Game&);                                \
  template BehaviorProfile<T> pure_behavior<T>(const Game&, const PureProfile&);               \
  template T reach_xi<T>(const Game&, int, const PureProfile&, const EtaTable<T>&, XiVariant,  \
                         int);                                                                 \
  template T continuation_xi<T>(const Game&, int, int, const BehaviorProfile<T>&,              \
                                const EtaTable<T>&);                                           \
  template std::vector<std::pair<const PureProfile*, T>> weights<T>(const JointDistribution&); \
  template T follow_reach_q<T>(const Game&, const JointDistribution&, const EtaTable<T>&, int); \
  template T q_mu<T>(const Game&, const JointDistribution&, int);                              \
  template TriggerReach<T> trigger_reach<T>(const Game&, const JointDistribution&,             \
                                            const BehaviorProfile<T>&, int, int,               \
                                            const EtaTable<T>&, int);

EFPCE_INSTANTIATE(double)
EFPCE_INSTANTIATE(Rational)

#undef EFPCE_INSTANTIATE

}  // namespace efpce
