#include "efpce/verifier.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

#include "efpce/game_format.hpp"

namespace efpce {

namespace {

template <class T>
T payoff(const Terminal& t, int player) {
  if constexpr (kIsExact<T>) {
    return t.u[player];
  } else {
    return t.u_d[player];
  }
}

template <class T>
std::string text_of(const T& x) {
  if constexpr (kIsExact<T>) {
    return format_rational(x);
  } else {
    return format_double(x);
  }
}

std::string query_name(const Game& g, const TriggerQuery& q) {
  const auto& I = g.infoset(q.infoset);
  return "(" + std::to_string(q.player + 1) + "," + I.label + "," + I.actions[q.action] + ")";
}

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

template <class T>
VerificationReport run_checks(const Game& game, const JointDistribution& mu,
                              const EtaTable<T>& eta, CheckKind kind, const Rational& eps,
                              double tol) {
  VerificationReport rep;
  rep.kind = kind;
  rep.eps = eps;
  rep.exact = kIsExact<T>;
  rep.tolerance = tol;
  const T tol_t = convert<T>(Rational(tol));
  T worst_value{0};
  for (const auto& q : all_queries(game)) {
    QueryResult r;
    r.query = q;
    const T follow = follow_value(game, mu, q, eta);
    const T dev = best_trigger_value(game, mu, q, eta, &r.plan);
    const T slack = follow - dev;
    r.follow = to_double(follow);
    r.deviate = to_double(dev);
    r.slack = to_double(slack);
    r.slack_text = text_of(slack);
    r.ok = slack >= -tol_t;
    if (!r.ok) rep.pass = false;
    if (rep.worst < 0 || slack < worst_value) {
      rep.worst = static_cast<int>(rep.queries.size());
      worst_value = slack;
    }
    rep.queries.push_back(std::move(r));
  }
  return rep;
}

bool use_exact(const Game& game, const JointDistribution& mu, const VerifyOptions& o) {
  if (o.exact.has_value()) return *o.exact;
  return game.exact() && mu.exact();
}

double tolerance_for(bool exact, const VerifyOptions& o) {
  if (o.tolerance) return *o.tolerance;
  return exact ? 0.0 : 1e-7;
}

}  // namespace

std::vector<TriggerQuery> all_queries(const Game& game) {
  std::vector<TriggerQuery> out;
  for (int I = 0; I < game.num_infosets(); ++I)
    for (int a = 0; a < static_cast<int>(game.infoset(I).actions.size()); ++a)
      out.push_back({game.infoset(I).player, I, a});
  return out;
}

template <class T>
T follow_value(const Game& game, const JointDistribution& mu, const TriggerQuery& q,
               const EtaTable<T>& eta) {
  T total{0};
  for (const auto& [pi, w] : weights<T>(mu)) {
    if ((*pi)[q.infoset] != q.action) continue;
    T s{0};
    for (int t : game.infoset(q.infoset).terminals) {
      const T u = payoff<T>(game.terminal(t), q.player);
      if (sgn(u) != 0) s += reach_xi(game, t, *pi, eta) * u;
    }
    total += w * s;
  }
  return total;
}

template <class T>
T best_trigger_value(const Game& game, const JointDistribution& mu, const TriggerQuery& q,
                     const EtaTable<T>& eta, std::vector<int>* plan) {
  const int p = q.player;
  // coef(z) for z ∈ Z(I), grouped later by the last own sequence of z.
  std::vector<T> coef(game.num_terminals(), T(0));
  const auto& terms = game.infoset(q.infoset).terminals;
  for (const auto& [pi, w] : weights<T>(mu)) {
    if ((*pi)[q.infoset] != q.action) continue;
    for (int t : terms) {
      const T u = payoff<T>(game.terminal(t), p);
      if (sgn(u) != 0)
        coef[t] += w * reach_xi(game, t, *pi, eta, XiVariant::kFrom, q.infoset) * u;
    }
  }
  std::vector<T> by_seq(game.num_actions(), T(0));
  for (int t : terms) by_seq[game.terminal(t).last_seq[p]] += coef[t];

  if (plan) plan->assign(game.num_infosets(), -1);
  std::function<T(int)> val = [&](int J) -> T {
    const auto& info = game.infoset(J);
    const int n = static_cast<int>(info.actions.size());
    std::vector<T> r(n);
    int best = 0;
    T sum{0};
    for (int b = 0; b < n; ++b) {
      const int gid = game.action_id(J, b);
      r[b] = by_seq[gid];
      for (int K : game.children(J, b)) r[b] += val(K);
      if (r[b] > r[best]) best = b;
      sum += eta.eta[gid] * r[b];
    }
    if (plan) (*plan)[J] = best;
    return sum + eta.slack[J] * r[best];
  };
  return val(q.infoset);
}

const QueryResult* VerificationReport::find(const Game& game, const std::string& infoset,
                                            const std::string& action) const {
  for (const auto& r : queries) {
    const auto& I = game.infoset(r.query.infoset);
    if (I.label == infoset && I.actions[r.query.action] == action) return &r;
  }
  return nullptr;
}

std::string VerificationReport::text(const Game& game) const {
  std::ostringstream os;
  os << "check: " << (kind == CheckKind::kEfce ? "efce" : "perturbed")
     << "  eps=" << format_rational(eps) << "  mode=" << (exact ? "exact" : "float")
     << "  tol=" << format_double(tolerance) << "\n";
  std::size_t w = 5;
  for (const auto& r : queries) w = std::max(w, query_name(game, r.query).size());
  auto pad = [&](std::string s, std::size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  os << pad("query", w) << "  " << pad("follow", 16) << pad("deviate", 16) << pad("slack", 16)
     << "status\n";
  for (const auto& r : queries)
    os << pad(query_name(game, r.query), w) << "  " << pad(fixed(r.follow), 16)
       << pad(fixed(r.deviate), 16) << pad(fixed(r.slack), 16)
       << (r.ok ? "ok" : "condition violated") << "\n";
  os << "verdict: " << (pass ? "PASS" : "FAIL");
  if (worst >= 0)
    os << "  min slack " << queries[worst].slack_text << " at "
       << query_name(game, queries[worst].query);
  os << "\n";
  return os.str();
}

std::string VerificationReport::tsv(const Game& game) const {
  std::ostringstream os;
  os << "query\tfollow\tdeviate\tslack\n";
  for (const auto& r : queries)
    os << query_name(game, r.query) << "\t" << format_double(r.follow) << "\t"
       << format_double(r.deviate) << "\t" << format_double(r.slack) << "\n";
  return os.str();
}

VerificationReport efce_check(const Game& game, const JointDistribution& mu,
                              const VerifyOptions& options) {
  const bool exact = use_exact(game, mu, options);
  const double tol = tolerance_for(exact, options);
  const auto schedule = TrembleSchedule::uniform(game);
  if (exact)
    return run_checks(game, mu, make_eta<Rational>(game, schedule, 0), CheckKind::kEfce, 0, tol);
  return run_checks(game, mu, make_eta<double>(game, schedule, 0), CheckKind::kEfce, 0, tol);
}

VerificationReport perturbed_ne_check(const Game& game, const JointDistribution& mu,
                                      const TrembleSchedule& schedule, const Rational& eps,
                                      const VerifyOptions& options) {
  const bool exact = use_exact(game, mu, options);
  const double tol = tolerance_for(exact, options);
  if (exact)
    return run_checks(game, mu, make_eta<Rational>(game, schedule, eps), CheckKind::kPerturbed,
                      eps, tol);
  return run_checks(game, mu, make_eta<double>(game, schedule, eps), CheckKind::kPerturbed, eps,
                    tol);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kEvidence:
      return "EFPCE-evidence";
    case Verdict::kUnstable:
      return "unstable";
    case Verdict::kFailed:
      return "failed";
  }
  return "?";
}

std::string EpsilonCertificate::text(const Game& game) const {
  std::ostringstream os;
  os << "verdict: " << to_string(verdict) << "\n";
  os << "grid:";
  for (const auto& e : grid) os << " " << format_rational(e);
  os << "\n";
  if (stabilized_at >= 0)
    os << "support stabilized at eps=" << format_rational(grid[stabilized_at]) << " ("
       << support.size() << " profiles)\n";
  if (first_failure) os << "first failing eps: " << format_rational(*first_failure) << "\n";
  for (const auto& r : reports) {
    os << "eps=" << format_rational(r.eps) << "  " << (r.pass ? "pass" : "FAIL")
       << "  min slack " << format_double(r.min_slack());
    if (r.worst >= 0) os << " at " << query_name(game, r.queries[r.worst].query);
    os << "\n";
  }
  if (efce) os << "eps=0 (efce)  " << (efce->pass ? "pass" : "FAIL") << "\n";
  os << "candidate:\n" << serialize_distribution(candidate, game);
  return os.str();
}

EpsilonCertificate efpce_evidence(const Game& game, const JointDistribution& mu,
                                  const TrembleSchedule& schedule,
                                  const std::vector<Rational>& grid,
                                  const VerifyOptions& options) {
  EpsilonCertificate cert;
  cert.candidate = mu;
  cert.grid = grid;
  bool ok = true;
  for (const auto& eps : grid) {
    cert.reports.push_back(perturbed_ne_check(game, mu, schedule, eps, options));
    if (!cert.reports.back().pass) {
      if (!cert.first_failure) cert.first_failure = eps;
      ok = false;
    }
  }
  cert.efce = efce_check(game, mu, options);
  ok = ok && cert.efce->pass;
  cert.support = support_of(mu);
  cert.stabilized_at = grid.empty() ? -1 : 0;
  cert.verdict = ok ? Verdict::kEvidence : Verdict::kFailed;
  return cert;
}

std::vector<PureProfile> support_of(const JointDistribution& mu, double threshold) {
  std::vector<PureProfile> out;
  for (const auto& [pi, p] : mu.entries)
    if (p.value > 0 && p.to_double() > threshold) out.push_back(pi);
  return out;
}

#define EFPCE_INSTANTIATE(T)                                                                   \
  template T best_trigger_value<T>(const Game&, const JointDistribution&, const TriggerQuery&, \
                                   const EtaTable<T>&, std::vector<int>*);                     \
  template T follow_value<T>(const Game&, const JointDistribution&, const TriggerQuery&,       \
                             const EtaTable<T>&);

EFPCE_INSTANTIATE(double)
EFPCE_INSTANTIATE(Rational)

#undef EFPCE_INSTANTIATE

}  // namespace efpce
