#pragma once

// Trigger-agent checks of a correlation device. Passing certifies the
// sufficient incentive conditions; failing only refutes those conditions.

#include <optional>
#include <string>
#include <vector>

#include "efpce/game.hpp"
#include "efpce/reach.hpp"

namespace efpce {

struct TriggerQuery {
  int player = 0;
  int infoset = 0;
  int action = 0;  // local index at `infoset`
};

/// Every (i, I, a) of the game in player-major infoset order.
std::vector<TriggerQuery> all_queries(const Game& game);

struct QueryResult {
  TriggerQuery query;
  double follow = 0;
  double deviate = 0;
  double slack = 0;
  std::string slack_text;  // exact value in exact mode
  bool ok = true;
  /// Maximizing action a*(J) for each J ⪰ I, -1 elsewhere.
  std::vector<int> plan;
};

enum class CheckKind { kEfce, kPerturbed };

struct VerificationReport {
  CheckKind kind = CheckKind::kEfce;
  Rational eps{0};
  bool exact = false;
  double tolerance = 0;
  std::vector<QueryResult> queries;
  bool pass = true;
  int worst = -1;  // index of the minimum slack, -1 when there are no queries

  double min_slack() const { return worst < 0 ? 0.0 : queries[worst].slack; }
  const QueryResult* find(const Game& game, const std::string& infoset,
                          const std::string& action) const;
  /// Aligned table, one line per query, then the verdict.
  std::string text(const Game& game) const;
  /// query, follow, deviate, slack.
  std::string tsv(const Game& game) const;
};

struct VerifyOptions {
  std::optional<bool> exact;        // nullopt: exact iff game and μ are rational
  std::optional<double> tolerance;  // default 1e-7 (float), 0 (exact)
};

/// Optimum of the trigger agent's continuation problem for (I,a), solved
/// bottom-up over J ⪰ I. With η = 0 this is the unperturbed best response.
template <class T>
T best_trigger_value(const Game& game, const JointDistribution& mu, const TriggerQuery& query,
                     const EtaTable<T>& eta, std::vector<int>* plan = nullptr);

/// Σ_{π: π(I)=a} μ(π) Σ_{z∈Z(I)} ξ^η(z,π)u_i(z).
template <class T>
T follow_value(const Game& game, const JointDistribution& mu, const TriggerQuery& query,
               const EtaTable<T>& eta);

VerificationReport efce_check(const Game& game, const JointDistribution& mu,
                              const VerifyOptions& options = {});
/// Throws EpsilonRangeError when ε is outside the schedule's range.
VerificationReport perturbed_ne_check(const Game& game, const JointDistribution& mu,
                                      const TrembleSchedule& schedule, const Rational& eps,
                                      const VerifyOptions& options = {});

enum class Verdict { kEvidence, kUnstable, kFailed };
const char* to_string(Verdict v);

struct EpsilonCertificate {
  JointDistribution candidate;
  std::vector<Rational> grid;               // grid actually used
  std::vector<VerificationReport> reports;  // perturbed checks, one per checked ε
  std::optional<VerificationReport> efce;   // the ε = 0 check
  std::vector<PureProfile> support;         // stabilized support (solver runs)
  int stabilized_at = -1;                   // grid index, -1 when never stable
  std::optional<Rational> first_failure;
  Verdict verdict = Verdict::kFailed;

  std::string text(const Game& game) const;
};

/// Perturbed checks at every grid ε plus the ε = 0 check.
EpsilonCertificate efpce_evidence(const Game& game, const JointDistribution& mu,
                                  const TrembleSchedule& schedule,
                                  const std::vector<Rational>& grid,
                                  const VerifyOptions& options = {});

/// Support of μ: profiles with mass above `threshold`, in profile order.
std::vector<PureProfile> support_of(const JointDistribution& mu, double threshold = 0.0);

}  // namespace efpce
