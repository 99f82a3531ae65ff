#pragma once

// ε-homotopy: solve the perturbed system along a vanishing grid, detect a
// stable support, re-solve on it and certify the candidate.

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "efpce/eah.hpp"
#include "efpce/verifier.hpp"

namespace efpce {

enum class Method { kDense, kEah, kAuto };
const char* to_string(Method m);
Method parse_method(std::string_view text);

/// Games with more profiles than this use EAH under Method::kAuto.
inline constexpr std::uint64_t kAutoDenseProfiles = 4096;

struct HomotopyConfig {
  std::vector<Rational> grid = default_grid();
  int window = 3;
  Method method = Method::kAuto;
  std::optional<bool> exact;  // nullopt: exact for rational data within kExactVariableLimit
  VerifyOptions verify;
  std::uint64_t profile_cap = kDefaultProfileCap;
  LPOptions lp;
  std::ostream* eah_trace = nullptr;

  /// 10^-1, ..., 10^-8.
  static std::vector<Rational> default_grid();
  /// Throws std::invalid_argument unless the grid is positive and strictly
  /// decreasing and window ≥ 2.
  void validate() const;
};

/// "1e-2,1e-3" or "geo(start,ratio,count)", parsed exactly.
std::vector<Rational> parse_grid(std::string_view text);

struct GridSolve {
  Rational eps;
  JointDistribution mu;
  std::vector<PureProfile> support;
  Method method = Method::kDense;  // path that produced μ
  bool exact = false;
  std::optional<EahStats> eah;
  std::string fallback_reason;  // non-empty when EAH fell back to dense
};

struct EfpceResult {
  JointDistribution mu;
  EpsilonCertificate certificate;
  std::vector<GridSolve> path;
  int joint_blocks = 0;  // perturbed blocks in the final restricted re-solve
};

/// Throws EpsilonRangeError when the schedule is invalid at a grid point and
/// std::runtime_error when a perturbed system is infeasible.
EfpceResult solve_efpce(const Game& game, const TrembleSchedule& schedule,
                        const HomotopyConfig& config = {});

struct EfceResult {
  JointDistribution mu;
  VerificationReport report;
  GridSolve solve;
};

EfceResult solve_efce(const Game& game, const HomotopyConfig& config = {});

/// One solve of the normalized feasibility form at ε (ε = 0 with no
/// schedule gives the unperturbed system). `pool` seeds and receives the
/// EAH column pool.
GridSolve solve_at(const Game& game, const TrembleSchedule* schedule, const Rational& eps,
                   const HomotopyConfig& config, std::vector<PureProfile>* pool = nullptr);

}  // namespace efpce
