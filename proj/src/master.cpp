#include "efpce/master.hpp"

#include <algorithm>
#include <cmath>

#include "efpce/game_format.hpp"

namespace efpce {

template <class T>
LPInstance<T> build_master(const std::vector<const ConstraintSystem<T>*>& blocks,
                           const std::vector<PureProfile>& columns) {
  LPInstance<T> lp;
  lp.maximize = true;
  std::vector<int> mu_vars;
  std::vector<std::pair<int, T>> norm;
  for (const auto& pi : columns) {
    const int v = lp.add_var("mu[" + format_profile(blocks.front()->game(), pi) + "]", T(0),
                             std::nullopt, T(1));
    mu_vars.push_back(v);
    norm.push_back({v, T(1)});
  }
  lp.add_row(std::move(norm), Relation::kLe, T(1), "total");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string tag = blocks.size() == 1 ? "" : "b" + std::to_string(k) + ":";
    append_block(lp, *blocks[k], columns, mu_vars, tag);
  }
  return lp;
}

template <class T>
MasterResult<T> solve_master(const std::vector<const ConstraintSystem<T>*>& blocks,
                             const std::vector<PureProfile>& columns,
                             const LPOptions& options) {
  MasterResult<T> out;
  const auto lp = build_master(blocks, columns);
  const auto sol = solve_lp(lp, options);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status != LPStatus::kOptimal) return out;
  out.objective = sol.objective;
  if constexpr (kIsExact<T>) {
    out.feasible = sol.objective == 1;
    if (!out.feasible) return out;
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (sgn(sol.x[k]) > 0) out.mu.entries.push_back({columns[k], Number{sol.x[k], true}});
  } else {
    out.feasible = sol.objective > 1 - 1e-7;
    if (!out.feasible) return out;
    double total = 0;
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (sol.x[k] > 1e-12) total += sol.x[k];
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (sol.x[k] > 1e-12)
        out.mu.entries.push_back({columns[k], Number{Rational(sol.x[k] / total), false}});
  }
  out.mu.sort(blocks.front()->game());
  return out;
}

#define EFPCE_INSTANTIATE(T)                                                                   \
  template LPInstance<T> build_master<T>(const std::vector<const ConstraintSystem<T>*>&,       \
                                         const std::vector<PureProfile>&);                     \
  template MasterResult<T> solve_master<T>(const std::vector<const ConstraintSystem<T>*>&,     \
                                           const std::vector<PureProfile>&, const LPOptions&);

EFPCE_INSTANTIATE(double)
EFPCE_INSTANTIATE(Rational)

#undef EFPCE_INSTANTIATE

}  // namespace efpce
