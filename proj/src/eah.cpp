#include "efpce/eah.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "efpce/game_format.hpp"
#include "efpce/kernels.hpp"

namespace efpce {

namespace {

constexpr double kProductTolerance = 1e-7;

double max_abs(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

std::vector<double> perturbed_behavior(const Game& g, const EtaTable<double>& eta,
                                       const BehaviorProfile<double>& beta) {
  std::vector<double> hat(g.num_actions());
  for (int gid = 0; gid < g.num_actions(); ++gid) {
    const int I = g.action_infoset(gid);
    hat[gid] = eta.eta[gid] + eta.slack[I] * beta[I][g.action_local(gid)];
  }
  return hat;
}

// Dense Gaussian elimination with partial pivoting; A is n x n row-major.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0) return {};
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(A[col * n + k], A[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || A[r * n + col] == 0) continue;
      const double f = A[r * n + col] / A[col * n + col];
      for (int k = col; k < n; ++k) A[r * n + k] -= f * A[col * n + k];
      b[r] -= f * b[col];
    }
  }
  for (int r = 0; r < n; ++r) b[r] /= A[r * n + r];
  return b;
}

std::vector<double> cut_gradient(const ConstraintSystem<double>& sys, const Cut& cut) {
  std::vector<double> g(sys.num_rows(), 0.0);
  switch (cut.kind) {
    case Cut::Kind::kBound:
      g[cut.index] = -1;
      break;
    case Cut::Kind::kTremble:
      for (const auto& e : sys.c_entries())
        if (e.col == cut.index) g[e.row] += e.value;
      break;
    case Cut::Kind::kProfile:
      g = sys.row_value(cut.profile);
      break;
    case Cut::Kind::kEquality:
      break;
  }
  return g;
}

}  // namespace

double expected_row_value(const ConstraintSystem<double>& sys, const std::vector<double>& y,
                          const BehaviorProfile<double>& beta) {
  const Game& g = sys.game();
  const auto& eta = sys.eta();
  const auto hat = perturbed_behavior(g, eta, beta);
  double E = 0;
  for (int I = 0; I < g.num_infosets(); ++I) {
    const int p = g.infoset(I).player;
    const int n = static_cast<int>(g.infoset(I).actions.size());
    for (int a = 0; a < n; ++a) {
      if (beta[I][a] == 0) continue;
      double Y = 0;
      for (int b = 0; b < n; ++b) Y += y[sys.row_id(I, a, I, b)];
      double sum = 0;
      for (int t : g.infoset(I).terminals) {
        const Terminal& term = g.terminal(t);
        const double u = term.u_d[p];
        if (u == 0) continue;
        double F = 1, D = 1;
        bool after = false;
        for (const Step& s : term.steps) {
          if (s.player < 0) {
            F *= s.prob_d;
            D *= s.prob_d;
          } else if (s.infoset == I) {
            after = true;
            F *= eta.factor(I, s.action, s.local == a);
          } else if (s.player == p && after) {
            F *= hat[s.action];
          } else {
            F *= hat[s.action];
            D *= hat[s.action];
          }
        }
        const int last = term.last_seq[p];
        const double yr = y[sys.row_id(I, a, g.action_infoset(last), g.action_local(last))];
        sum += u * (Y * F - yr * D);
      }
      E += beta[I][a] * sum;
    }
  }
  return E;
}

double expected_row_value_enumerated(const ConstraintSystem<double>& sys,
                                     const std::vector<double>& y,
                                     const BehaviorProfile<double>& beta, std::uint64_t cap) {
  double E = 0;
  for (const auto& pi : enumerate_profiles(sys.game(), cap)) {
    double w = 1;
    for (int I = 0; I < sys.game().num_infosets() && w != 0; ++I) w *= beta[I][pi[I]];
    if (w != 0) E += w * sys.at_times(y, pi);
  }
  return E;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& rates) {
  const int n = static_cast<int>(rates.size());
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) reach[a][b] = a == b || rates[a][b] > 0;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (reach[a][k] && reach[k][b]) reach[a][b] = 1;

  std::vector<double> out(n, 0.0);
  std::vector<char> seen(n, 0);
  int classes = 0;
  for (int a = 0; a < n; ++a) {
    if (seen[a]) continue;
    bool closed = true;
    for (int b = 0; b < n; ++b)
      if (reach[a][b] && !reach[b][a]) closed = false;
    if (!closed) continue;
    std::vector<int> cls;
    for (int b = 0; b < n; ++b)
      if (reach[a][b]) {
        cls.push_back(b);
        seen[b] = 1;
      }
    const int k = static_cast<int>(cls.size());
    std::vector<double> pi(k, 1.0);
    if (k > 1) {
      // Balance: Σ_a π(a)q(a,b) - π(b)Σ_c q(b,c) = 0, last row replaced by Σπ = 1.
      std::vector<double> A(k * k, 0.0), rhs(k, 0.0);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          if (i == j) continue;
          A[j * k + i] += rates[cls[i]][cls[j]];
          A[j * k + j] -= rates[cls[j]][cls[i]];
        }
      for (int i = 0; i < k; ++i) A[(k - 1) * k + i] = 1;
      rhs[k - 1] = 1;
      pi = solve_dense(std::move(A), std::move(rhs), k);
      if (pi.empty()) throw std::runtime_error("stationarity solve failed: singular balance");
      double s = 0;
      for (double& x : pi) s += (x = std::max(x, 0.0));
      for (double& x : pi) x /= s;
    }
    for (int i = 0; i < k; ++i) out[cls[i]] += pi[i];
    ++classes;
  }
  for (double& x : out) x /= classes;
  return out;
}

BehaviorProfile<double> product_from_dual(const ConstraintSystem<double>& sys,
                                          const std::vector<double>& y, double* error) {
  const Game& g = sys.game();
  const auto& eta = sys.eta();
  const double scale = std::max(1.0, max_abs(y));
  std::vector<double> yn(y.size());
  for (std::size_t r = 0; r < y.size(); ++r) yn[r] = y[r] / scale;

  auto beta = uniform_behavior<double>(g);
  std::vector<double> reach(g.num_infosets(), 1.0);  // R_K: own perturbed reach of K
  auto hat = [&](int gid) {
    const int J = g.action_infoset(gid);
    return eta.eta[gid] + eta.slack[J] * beta[J][g.action_local(gid)];
  };
  for (int p = 0; p < g.num_players(); ++p) {
    for (int K : g.topo_order(p)) {
      const auto& info = g.infoset(K);
      const int n = static_cast<int>(info.actions.size());
      double R = 1;
      for (int gid : info.own_sequence) R *= hat(gid);
      reach[K] = R;

      std::vector<double> z(n, 0.0);
      for (int I = g.infoset_begin(p); I < g.infoset_end(p); ++I) {
        if (!g.precedes(I, K)) continue;
        for (int a = 0; a < static_cast<int>(g.infoset(I).actions.size()); ++a) {
          const double w = reach[I] * beta[I][a];
          if (w == 0) continue;
          for (int d = 0; d < n; ++d) z[d] += w * yn[sys.row_id(I, a, K, d)];
        }
      }
      double Z = 0;
      for (double x : z) Z += x;

      std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
      for (int a = 0; a < n; ++a) {
        double Y = 0;
        for (int b = 0; b < n; ++b) Y += yn[sys.row_id(K, a, K, b)];
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          const double etab = eta.eta[g.action_id(K, b)];
          const double m = yn[sys.row_id(K, a, K, b)] - etab * Y;
          const double e = z[b] - etab * Z;
          q[a][b] = std::max(0.0, R * m + e);
        }
      }
      beta[K] = stationary_distribution(q);
    }
  }
  const double E = std::fabs(expected_row_value(sys, yn, beta));
  if (error) *error = E;
  if (!(E <= kProductTolerance))
    throw OracleError("product distribution misses the zero-expectation postcondition (|E| = " +
                          format_double(E) + ")",
                      y);
  return beta;
}

PureProfile purify(const ConstraintSystem<double>& sys, const std::vector<double>& y,
                   BehaviorProfile<double> beta) {
  const Game& g = sys.game();
  const double scale = std::max(1.0, max_abs(y));
  double current = expected_row_value(sys, y, beta);
  PureProfile pi(g.num_infosets(), 0);
  for (int K : g.topo_order_all()) {
    const int n = static_cast<int>(g.infoset(K).actions.size());
    const auto saved = beta[K];
    int best = -1;
    double best_value = 0;
    for (int c = 0; c < n; ++c) {
      beta[K].assign(n, 0.0);
      beta[K][c] = 1;
      const double v = expected_row_value(sys, y, beta);
      if (best < 0 || v > best_value) {
        best = c;
        best_value = v;
      }
    }
    if (best_value < current - kProductTolerance * scale) {
      beta[K] = saved;
      throw OracleError("purification found no admissible action at infoset " +
                            g.infoset(K).label,
                        y);
    }
    beta[K].assign(n, 0.0);
    beta[K][best] = 1;
    pi[K] = best;
    current = best_value;
  }
  return pi;
}

const char* to_string(Cut::Kind k) {
  switch (k) {
    case Cut::Kind::kBound:
      return "bound";
    case Cut::Kind::kTremble:
      return "tremble";
    case Cut::Kind::kEquality:
      return "equality";
    case Cut::Kind::kProfile:
      return "profile";
  }
  return "?";
}

Cut separation_oracle(const ConstraintSystem<double>& sys, const std::vector<double>& y) {
  Cut cut;
  int worst = -1;
  for (int r = 0; r < sys.num_rows(); ++r)
    if (y[r] < 0 && (worst < 0 || y[r] < y[worst])) worst = r;
  if (worst >= 0) {
    cut.kind = Cut::Kind::kBound;
    cut.index = worst;
    cut.violation = -y[worst];
    return cut;
  }
  const auto ct = sys.ct_times(y);
  worst = -1;
  for (int k = 0; k < static_cast<int>(ct.size()); ++k)
    if (ct[k] > 0 && (worst < 0 || ct[k] > ct[worst])) worst = k;
  if (worst >= 0) {
    cut.kind = Cut::Kind::kTremble;
    cut.index = worst;
    cut.violation = ct[worst];
    return cut;
  }
  const double scale = std::max(1.0, max_abs(y));
  const auto bt = sys.bt_times(y);
  const double bt_err = max_abs(bt);
  if (bt_err > 1e-9 * scale) {
    cut.kind = Cut::Kind::kEquality;
    cut.violation = bt_err;
    return cut;
  }
  const auto beta = product_from_dual(sys, y, &cut.product_value);
  cut.kind = Cut::Kind::kProfile;
  cut.profile = purify(sys, y, beta);
  const double value = sys.at_times(y, cut.profile);
  if (!(value >= -1 + 1e-9))
    throw OracleError("purified profile " + format_profile(sys.game(), cut.profile) +
                          " has row value " + format_double(value) + " <= -1",
                      y);
  cut.violation = value + 1;
  return cut;
}

double central_cut_log_ratio(int d) {
  if (d <= 1) return std::log(0.5);
  const double dd = d;
  return std::log(dd / (dd + 1)) + 0.5 * (dd - 1) * std::log(dd * dd / (dd * dd - 1));
}

template <class T>
EahResult<T> eah_solve(const ConstraintSystem<T>& sys, const ConstraintSystem<double>& fsys,
                       const EahOptions& options) {
  const Game& game = fsys.game();
  const int m = fsys.num_rows();
  const int nv = fsys.num_v();
  const int d = m - nv;
  EahResult<T> res;
  auto& st = res.stats;
  st.rows = m;
  st.dimension = d;
  st.cap = options.max_iterations
               ? *options.max_iterations
               : static_cast<long>(std::ceil(2.0 * m * m *
                                             std::log(options.radius / options.min_radius)));

  // Orthonormal basis U of range(B); P = I - UUᵀ projects onto null(Bᵀ).
  std::vector<std::vector<double>> U;
  {
    std::vector<std::vector<double>> cols(nv, std::vector<double>(m, 0.0));
    for (const auto& e : fsys.b_entries()) cols[e.col][e.row] = e.value;
    for (auto& v : cols) {
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : U) kernels::axpy(-kernels::dot(u, v), u, v);
      const double nrm = std::sqrt(kernels::dot(v, v));
      for (double& x : v) x /= nrm;
      U.push_back(std::move(v));
    }
  }
  auto project = [&](std::vector<double>& v) {
    for (const auto& u : U) kernels::axpy(-kernels::dot(u, v), u, v);
  };
  auto project_matrix = [&](std::vector<double>& Q) {
    // Q <- P Q P, then symmetrize.
    std::vector<double> row(m);
    for (int i = 0; i < m; ++i) {
      std::copy(Q.begin() + i * m, Q.begin() + (i + 1) * m, row.begin());
      project(row);
      std::copy(row.begin(), row.end(), Q.begin() + i * m);
    }
    std::vector<double> col(m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) col[i] = Q[i * m + j];
      project(col);
      for (int i = 0; i < m; ++i) Q[i * m + j] = col[i];
    }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) Q[i * m + j] = Q[j * m + i] =
          0.5 * (Q[i * m + j] + Q[j * m + i]);
  };

  std::set<std::uint64_t> in_pool;
  auto add_to_pool = [&](const PureProfile& pi) {
    if (in_pool.insert(profile_index(game, pi)).second) {
      res.pool.push_back(pi);
      return true;
    }
    return false;
  };
  for (const auto& pi : options.initial_pool) add_to_pool(pi);

  auto try_master = [&]() {
    if (res.pool.empty()) return false;
    res.master = solve_master<T>({&sys}, res.pool, options.lp);
    return res.master.feasible;
  };

  if (options.trace) *options.trace << "iteration\tcut\tindex\tviolation\tlog_volume\tpool\n";
  if (try_master()) {
    st.early_stop = true;
    return res;
  }

  std::vector<double> c(m, 0.0);
  std::vector<double> Q(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) Q[i * m + i] = options.radius * options.radius;
  project_matrix(Q);
  st.log_volume = d * std::log(options.radius);
  const double stop_volume = d * std::log(options.min_radius);

  std::size_t next_size = 1;
  long next_iter = 1;
  std::size_t checked_size = res.pool.size();
  bool last_was_projection = false;
  std::vector<double> Qg(m);

  while (st.iterations < st.cap) {
    if (st.log_volume < stop_volume) {
      st.certified = true;
      break;
    }
    ++st.iterations;
    const Cut cut = separation_oracle(fsys, c);
    if (cut.kind == Cut::Kind::kProfile) {
      ++st.oracle_calls;
      st.max_product_error = std::max(st.max_product_error, cut.product_value);
    }
    if (options.trace)
      *options.trace << st.iterations << "\t" << to_string(cut.kind) << "\t"
                     << (cut.kind == Cut::Kind::kProfile ? format_profile(game, cut.profile)
                                                         : std::to_string(cut.index))
                     << "\t" << format_double(cut.violation) << "\t"
                     << format_double(st.log_volume) << "\t" << res.pool.size() << "\n";
    if (cut.kind == Cut::Kind::kEquality) {
      if (last_was_projection) throw OracleError("re-projection did not restore B^T y = 0", c);
      last_was_projection = true;
      project(c);
      continue;
    }
    last_was_projection = false;

    if (cut.kind == Cut::Kind::kProfile) {
      ++st.profile_cuts;
      const double dense = fsys.at_times(c, cut.profile);
      const double poly = expected_row_value(fsys, c, pure_behavior<double>(game, cut.profile));
      const double scale = std::max(1.0, max_abs(c));
      if (dense > -1 && poly > -1 && std::fabs(dense - poly) <= 1e-9 * scale)
        ++st.confirmed_cuts;
      add_to_pool(cut.profile);
    }

    const auto g = cut_gradient(fsys, cut);
    kernels::matvec(Q, m, m, g, Qg);
    const double gQg = kernels::dot(g, Qg);
    if (!(gQg > 0)) {
      // The cut is constant on the ellipsoid and violated at its center.
      st.certified = true;
      break;
    }
    const double inv = 1.0 / std::sqrt(gQg);
    for (double& x : Qg) x *= inv;  // b
    if (d <= 1) {
      kernels::axpy(-0.5, Qg, c);
      for (double& x : Q) x *= 0.25;
    } else {
      const double dd = d;
      kernels::axpy(-1.0 / (dd + 1), Qg, c);
      const double f = dd * dd / (dd * dd - 1);
      const double h = 2.0 / (dd + 1);
      for (int i = 0; i < m; ++i)
        kernels::axpby(-f * h * Qg[i], Qg, f, std::span<double>(Q).subspan(i * m, m));
    }
    st.log_volume += central_cut_log_ratio(d);
    if (st.iterations % 64 == 0) {
      project_matrix(Q);
      project(c);
    }

    if (res.pool.size() > checked_size &&
        (res.pool.size() >= next_size || st.iterations >= next_iter)) {
      checked_size = res.pool.size();
      next_size = std::max(next_size + 1, res.pool.size() * 3 / 2);
      next_iter = 2 * st.iterations;
      if (try_master()) {
        st.early_stop = true;
        return res;
      }
    }
  }
  if (try_master()) return res;
  throw LPError("oracle or geometry fault: restricted master infeasible after " +
                std::to_string(st.iterations) + " ellipsoid iterations (cap " +
                std::to_string(st.cap) + ")");
}

template EahResult<double> eah_solve<double>(const ConstraintSystem<double>&,
                                             const ConstraintSystem<double>&, const EahOptions&);
template EahResult<Rational> eah_solve<Rational>(const ConstraintSystem<Rational>&,
                                                 const ConstraintSystem<double>&,
                                                 const EahOptions&);

}  // namespace efpce
