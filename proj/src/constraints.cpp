#include "efpce/constraints.hpp"

#include <algorithm>
#include <map>
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

std::string fmt(double x) { return format_double(x); }
std::string fmt(const Rational& x) { return format_rational(x); }

}  // namespace

int count_rows(const Game& game) {
  int n = 0;
  for (int I = 0; I < game.num_infosets(); ++I)
    for (int J = 0; J < game.num_infosets(); ++J)
      if (J == I || (game.infoset(I).player == game.infoset(J).player && game.precedes(I, J)))
        n += static_cast<int>(game.infoset(I).actions.size() * game.infoset(J).actions.size());
  return n;
}

template <class T>
ConstraintSystem<T> build_system(const Game& game, const TrembleSchedule* schedule,
                                 const Rational& eps) {
  ConstraintSystem<T> sys;
  sys.game_ = &game;
  sys.perturbed_ = schedule != nullptr;
  sys.eps_ = eps;
  if (schedule) {
    sys.eta_ = make_eta<T>(game, *schedule, eps);
  } else {
    sys.eta_.eps = 0;
    sys.eta_.eta.assign(game.num_actions(), T(0));
    sys.eta_.slack.assign(game.num_infosets(), T(1));
  }

  const int n_inf = game.num_infosets();
  sys.row_base_.assign(game.num_actions(), std::vector<int>(n_inf, -1));
  for (int p = 0; p < game.num_players(); ++p)
    for (int I = game.infoset_begin(p); I < game.infoset_end(p); ++I)
      for (int a = 0; a < static_cast<int>(game.infoset(I).actions.size()); ++a)
        for (int J = game.infoset_begin(p); J < game.infoset_end(p); ++J) {
          if (J != I && !game.precedes(I, J)) continue;
          sys.row_base_[game.action_id(I, a)][J] = sys.num_rows();
          for (int b = 0; b < static_cast<int>(game.infoset(J).actions.size()); ++b)
            sys.rows_.push_back(RowIndex{p, I, a, J, b});
        }

  for (int p = 0; p < game.num_players(); ++p)
    for (int I = game.infoset_begin(p); I < game.infoset_end(p); ++I)
      for (int a = 0; a < static_cast<int>(game.infoset(I).actions.size()); ++a)
        for (int K = game.infoset_begin(p); K < game.infoset_end(p); ++K) {
          if (!game.precedes(I, K)) continue;
          VColumn v{p, I, a, K, {}, -1};
          const int base = sys.row_base_[game.action_id(I, a)][K];
          for (int b = 0; b < static_cast<int>(game.infoset(K).actions.size()); ++b)
            v.plus_rows.push_back(base + b);
          const int ps = game.infoset(K).parent_seq;
          v.minus_row = sys.row_id(I, a, game.action_infoset(ps), game.action_local(ps));
          const int col = sys.num_v();
          for (int r : v.plus_rows) sys.b_.push_back({r, col, T(1)});
          sys.b_.push_back({v.minus_row, col, T(-1)});
          sys.v_cols_.push_back(std::move(v));
        }
  std::sort(sys.b_.begin(), sys.b_.end(), [](const auto& x, const auto& y) {
    return std::pair(x.col, x.row) < std::pair(y.col, y.row);
  });

  if (sys.perturbed_) {
    for (int col = 0; col < sys.num_rows(); ++col) {
      const RowIndex& w = sys.rows_[col];
      std::map<int, T> entries;
      entries[col] -= 1;
      const T& eta = sys.eta_.eta[game.action_id(w.target, w.target_action)];
      if (sgn(eta) != 0) {
        if (w.target == w.infoset) {
          const int base = sys.row_base_[game.action_id(w.infoset, w.action)][w.infoset];
          for (int b = 0; b < static_cast<int>(game.infoset(w.infoset).actions.size()); ++b)
            entries[base + b] += eta;
        } else {
          const int ps = game.infoset(w.target).parent_seq;
          entries[sys.row_id(w.infoset, w.action, game.action_infoset(ps),
                             game.action_local(ps))] += eta;
        }
      }
      for (const auto& [r, v] : entries)
        if (sgn(v) != 0) sys.c_.push_back({r, col, v});
    }
  }
  return sys;
}

template <class T>
int ConstraintSystem<T>::row_id(int infoset, int action, int target, int target_action) const {
  const int base = row_base_[game_->action_id(infoset, action)][target];
  return base < 0 ? -1 : base + target_action;
}

template <class T>
std::vector<T> ConstraintSystem<T>::row_value(const PureProfile& pi) const {
  const Game& g = *game_;
  std::vector<T> col(num_rows(), T(0));
  std::vector<T> full(g.num_terminals());
  for (int t = 0; t < g.num_terminals(); ++t) full[t] = reach_xi(g, t, pi, eta_);
  for (int I = 0; I < g.num_infosets(); ++I) {
    const int p = g.infoset(I).player;
    const int a = pi[I];
    const int gid = g.action_id(I, a);
    T follow{0};
    for (int t : g.infoset(I).terminals) {
      const Terminal& term = g.terminal(t);
      const T u = payoff<T>(term, p);
      if (sgn(u) == 0) continue;
      follow += full[t] * u;
      const T dev = reach_xi(g, t, pi, eta_, XiVariant::kFrom, I);
      const int last = term.last_seq[p];
      col[row_base_[gid][g.action_infoset(last)] + g.action_local(last)] -= dev * u;
    }
    if (sgn(follow) != 0) {
      const int base = row_base_[gid][I];
      for (int b = 0; b < static_cast<int>(g.infoset(I).actions.size()); ++b) col[base + b] += follow;
    }
  }
  return col;
}

template <class T>
std::vector<T> ConstraintSystem<T>::bt_times(const std::vector<T>& y) const {
  std::vector<T> out(num_v(), T(0));
  for (const auto& e : b_) out[e.col] += e.value * y[e.row];
  return out;
}

template <class T>
std::vector<T> ConstraintSystem<T>::ct_times(const std::vector<T>& y) const {
  std::vector<T> out(num_w(), T(0));
  for (const auto& e : c_) out[e.col] += e.value * y[e.row];
  return out;
}

template <class T>
T ConstraintSystem<T>::at_times(const std::vector<T>& y, const PureProfile& pi) const {
  const auto col = row_value(pi);
  T s{0};
  for (int r = 0; r < num_rows(); ++r) s += col[r] * y[r];
  return s;
}

template <class T>
std::string ConstraintSystem<T>::row_name(int r) const {
  const auto& x = rows_[r];
  const Game& g = *game_;
  return "(" + std::to_string(x.player + 1) + "," + g.infoset(x.infoset).label + "," +
         g.infoset(x.infoset).actions[x.action] + "," + g.infoset(x.target).label + "," +
         g.infoset(x.target).actions[x.target_action] + ")";
}

template <class T>
std::string ConstraintSystem<T>::v_name(int c) const {
  const auto& v = v_cols_[c];
  const Game& g = *game_;
  return "v(" + std::to_string(v.player + 1) + "," + g.infoset(v.infoset).label + "," +
         g.infoset(v.infoset).actions[v.action] + "," + g.infoset(v.target).label + ")";
}

template <class T>
std::string ConstraintSystem<T>::w_name(int c) const {
  return "w" + row_name(c);
}

template <class T>
std::string ConstraintSystem<T>::dump_tsv(const std::vector<PureProfile>& columns) const {
  std::ostringstream os;
  os << "row\tcolumn\tcoefficient\n";
  for (const auto& pi : columns) {
    const auto col = row_value(pi);
    const std::string name = "mu[" + format_profile(*game_, pi) + "]";
    for (int r = 0; r < num_rows(); ++r)
      if (sgn(col[r]) != 0) os << row_name(r) << "\t" << name << "\t" << fmt(col[r]) << "\n";
  }
  for (const auto& e : b_) os << row_name(e.row) << "\t" << v_name(e.col) << "\t" << fmt(e.value) << "\n";
  for (const auto& e : c_) os << row_name(e.row) << "\t" << w_name(e.col) << "\t" << fmt(e.value) << "\n";
  return os.str();
}

template <class T>
int append_block(LPInstance<T>& lp, const ConstraintSystem<T>& sys,
                 const std::vector<PureProfile>& columns, const std::vector<int>& mu_vars,
                 const std::string& tag) {
  const int m = sys.num_rows();
  std::vector<std::vector<std::pair<int, T>>> coefs(m);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto col = sys.row_value(columns[k]);
    for (int r = 0; r < m; ++r)
      if (sgn(col[r]) != 0) coefs[r].push_back({mu_vars[k], col[r]});
  }
  std::vector<int> v_vars(sys.num_v());
  for (int c = 0; c < sys.num_v(); ++c)
    v_vars[c] = lp.add_var(tag + sys.v_name(c), std::nullopt, std::nullopt);
  for (const auto& e : sys.b_entries()) coefs[e.row].push_back({v_vars[e.col], e.value});
  std::vector<int> w_vars(sys.num_w());
  for (int c = 0; c < sys.num_w(); ++c) w_vars[c] = lp.add_var(tag + sys.w_name(c));
  for (const auto& e : sys.c_entries()) coefs[e.row].push_back({w_vars[e.col], e.value});
  const int first = lp.num_rows();
  for (int r = 0; r < m; ++r)
    lp.add_row(std::move(coefs[r]), Relation::kGe, T(0), tag + sys.row_name(r));
  return first;
}

#define EFPCE_INSTANTIATE(T)                                                                   \
  template class ConstraintSystem<T>;                                                          \
  template ConstraintSystem<T> build_system<T>(const Game&, const TrembleSchedule*,            \
                                               const Rational&);                               \
  template int append_block<T>(LPInstance<T>&, const ConstraintSystem<T>&,                     \
                               const std::vector<PureProfile>&, const std::vector<int>&,       \
                               const std::string&);

EFPCE_INSTANTIATE(double)
EFPCE_INSTANTIATE(Rational)

#undef EFPCE_INSTANTIATE

}  // namespace efpce
