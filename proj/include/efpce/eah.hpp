#pragma once

// Ellipsoid against hope on the dual of the homogeneous incentive system:
//
//   y ≥ 0,  Bᵀy = 0,  C_tᵀy ≤ 0,  A_tᵀy ≤ -1.
//
// The dual is infeasible whenever a correlated equilibrium of the (perturbed)
// game exists. Running the central-cut ellipsoid on it with a separation
// oracle that returns violated pure-profile rows collects a pool of profiles
// on which the restricted primal is feasible.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "efpce/constraints.hpp"
#include "efpce/master.hpp"

namespace efpce {

/// Hard oracle failure; carries the offending dual point.
class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, std::vector<double> y)
      : std::runtime_error(what), y_(std::move(y)) {}
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> y_;
};

/// Σ_π μ_β(π)(A_tᵀy)_π for the product distribution of β, evaluated in
/// polynomial time.
double expected_row_value(const ConstraintSystem<double>& sys, const std::vector<double>& y,
                          const BehaviorProfile<double>& beta);
/// Same quantity by enumerating Π; for testing small games.
double expected_row_value_enumerated(const ConstraintSystem<double>& sys,
                                     const std::vector<double>& y,
                                     const BehaviorProfile<double>& beta,
                                     std::uint64_t cap = kDefaultProfileCap);

/// Per-infoset behaviour whose product distribution has zero expected row
/// value. Requires y ≥ 0, Bᵀy = 0 and C_tᵀy ≤ 0. Throws OracleError when the
/// result misses the zero-expectation postcondition (|E| ≤ 1e-7 at the
/// normalization max|y| ≤ 1); `error` receives that |E|.
BehaviorProfile<double> product_from_dual(const ConstraintSystem<double>& sys,
                                          const std::vector<double>& y,
                                          double* error = nullptr);

/// Stationary distribution of a rate matrix (off-diagonal rates ≥ 0). For
/// reducible chains, the equal mixture over closed classes.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& rates);

/// Fixes one action per infoset in topological order, keeping the expected
/// row value from decreasing; ties go to the first action.
PureProfile purify(const ConstraintSystem<double>& sys, const std::vector<double>& y,
                   BehaviorProfile<double> beta);

struct Cut {
  enum class Kind { kBound, kTremble, kEquality, kProfile };
  Kind kind = Kind::kBound;
  int index = -1;       // row (kBound) or W column (kTremble)
  PureProfile profile;  // kProfile
  double violation = 0;
  double product_value = 0;  // |E| of the product distribution (kProfile)
};

const char* to_string(Cut::Kind k);

/// Checks y ≥ 0, C_tᵀy ≤ 0 and Bᵀy = 0 (beyond 1e-9) in that order and
/// returns the first violation; otherwise a profile with (A_tᵀy)_π > -1.
Cut separation_oracle(const ConstraintSystem<double>& sys, const std::vector<double>& y);

struct EahOptions {
  double radius = 1e6;       // initial ball
  double min_radius = 1e-6;  // termination radius
  std::optional<long> max_iterations;  // default ⌈2m² ln(R/r)⌉
  std::vector<PureProfile> initial_pool;
  std::ostream* trace = nullptr;  // TSV, one line per iteration
  LPOptions lp;
};

struct EahStats {
  long iterations = 0;
  long cap = 0;
  int dimension = 0;  // m - #V
  int rows = 0;       // m
  long profile_cuts = 0;
  long confirmed_cuts = 0;  // violation rechecked by dense evaluation
  long oracle_calls = 0;
  double max_product_error = 0;  // max |E| over oracle calls
  double log_volume = 0;         // relative to the unit ball of the subspace
  bool early_stop = false;       // master reached 1 before certification
  bool certified = false;        // volume dropped below the termination ball
};

template <class T>
struct EahResult {
  MasterResult<T> master;
  std::vector<PureProfile> pool;
  EahStats stats;
};

/// Ellipsoid runs in double; the final restricted master is solved over T on
/// `sys`. Throws OracleError on oracle faults and LPError when the pool
/// does not yield a feasible master.
template <class T>
EahResult<T> eah_solve(const ConstraintSystem<T>& sys, const ConstraintSystem<double>& fsys,
                       const EahOptions& options = {});

/// Per-cut log-volume ratio of the central-cut update in dimension d.
double central_cut_log_ratio(int d);

}  // namespace efpce
