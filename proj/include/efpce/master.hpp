#pragma once

// Normalized feasibility form of the incentive system: maximize Σμ subject to
// Σμ ≤ 1 and one A_t μ + B v + C_t w ≥ 0 block per system, with μ restricted
// to a column set. The optimum is 1 when a feasible μ exists on the columns
// and 0 otherwise.

#include <string>
#include <vector>

#include "efpce/constraints.hpp"
#include "efpce/lp.hpp"

namespace efpce {

template <class T>
struct MasterResult {
  LPStatus status = LPStatus::kInfeasible;
  bool feasible = false;  // optimum reached 1
  T objective{0};
  JointDistribution mu;   // normalized, zero entries dropped
  long iterations = 0;
};

/// All systems must share the same game.
template <class T>
LPInstance<T> build_master(const std::vector<const ConstraintSystem<T>*>& blocks,
                           const std::vector<PureProfile>& columns);

template <class T>
MasterResult<T> solve_master(const std::vector<const ConstraintSystem<T>*>& blocks,
                             const std::vector<PureProfile>& columns,
                             const LPOptions& options = {});

}  // namespace efpce
