#pragma once

// Block-structured incentive system A_t μ + B v + C_t w ≥ 0.
//
// Rows are deviation tuples (i, I, a, J, a') with J ⪰ I. The follow value
// variable v[i,I,a,I] is substituted out, so V columns exist only for J ≻ I
// and the J = I rows carry the follow term of μ directly.

#include <string>
#include <vector>

#include "efpce/game.hpp"
#include "efpce/lp.hpp"
#include "efpce/reach.hpp"

namespace efpce {

struct RowIndex {
  int player = 0;
  int infoset = 0;  // I
  int action = 0;   // local index of a at I
  int target = 0;   // J
  int target_action = 0;  // local index of a' at J
};

struct VColumn {
  int player = 0;
  int infoset = 0;  // I
  int action = 0;   // a
  int target = 0;   // J ≻ I
  std::vector<int> plus_rows;  // rows (i,I,a,J,·)
  int minus_row = -1;          // parent row (i,I,a,J',a'') with J ∈ C(J',a'')
};

template <class T>
struct Coefficient {
  int row = 0;
  int col = 0;
  T value{0};
};

template <class T>
class ConstraintSystem {
 public:
  const Game& game() const { return *game_; }
  bool perturbed() const { return perturbed_; }
  const Rational& eps() const { return eps_; }
  const EtaTable<T>& eta() const { return eta_; }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_v() const { return static_cast<int>(v_cols_.size()); }
  /// One W column per row when perturbed, none otherwise.
  int num_w() const { return perturbed_ ? num_rows() : 0; }

  const RowIndex& row(int r) const { return rows_[r]; }
  const std::vector<RowIndex>& rows() const { return rows_; }
  const VColumn& v_column(int c) const { return v_cols_[c]; }
  /// Row id of (I, a, J, a'), or -1 when J ⋡ I.
  int row_id(int infoset, int action, int target, int target_action) const;

  /// Sparse B and C_t, ordered by (column, row).
  const std::vector<Coefficient<T>>& b_entries() const { return b_; }
  const std::vector<Coefficient<T>>& c_entries() const { return c_; }

  /// Dense column A_t(·, π).
  std::vector<T> row_value(const PureProfile& pi) const;

  /// Bᵀy and C_tᵀy.
  std::vector<T> bt_times(const std::vector<T>& y) const;
  std::vector<T> ct_times(const std::vector<T>& y) const;
  /// (A_tᵀ y)_π.
  T at_times(const std::vector<T>& y, const PureProfile& pi) const;

  std::string row_name(int r) const;
  std::string v_name(int c) const;
  std::string w_name(int c) const;

  /// TSV (row, column, coefficient) over B, C_t and the given μ columns.
  std::string dump_tsv(const std::vector<PureProfile>& columns) const;

  template <class U>
  friend ConstraintSystem<U> build_system(const Game&, const TrembleSchedule*, const Rational&);

 private:
  const Game* game_ = nullptr;
  bool perturbed_ = false;
  Rational eps_{0};
  EtaTable<T> eta_;
  std::vector<RowIndex> rows_;
  std::vector<std::vector<int>> row_base_;  // [global action of (I,a)][J] -> first row or -1
  std::vector<VColumn> v_cols_;
  std::vector<Coefficient<T>> b_;
  std::vector<Coefficient<T>> c_;
};

template <class T>
ConstraintSystem<T> build_system(const Game& game, const TrembleSchedule* schedule,
                                 const Rational& eps);

/// ε-free system (no W block).
template <class T>
ConstraintSystem<T> build_efce_system(const Game& game) {
  return build_system<T>(game, nullptr, Rational(0));
}

/// Perturbed system at ε; throws EpsilonRangeError outside the schedule range.
template <class T>
ConstraintSystem<T> build_perturbed_system(const Game& game, const TrembleSchedule& schedule,
                                           const Rational& eps) {
  return build_system<T>(game, &schedule, eps);
}

/// Σ_i Σ_{I,a} Σ_{J⪰I} |A(J)|.
int count_rows(const Game& game);

/// Appends the block A_t μ + B v + C_t w ≥ 0 to an LP whose μ variables are
/// `mu_vars` (aligned with `columns`). Returns the first row index added.
template <class T>
int append_block(LPInstance<T>& lp, const ConstraintSystem<T>& sys,
                 const std::vector<PureProfile>& columns, const std::vector<int>& mu_vars,
                 const std::string& tag);

}  // namespace efpce
