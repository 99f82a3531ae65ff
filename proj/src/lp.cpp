#include "efpce/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "efpce/kernels.hpp"

namespace efpce {

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal:
      return "Optimal";
    case LPStatus::kUnbounded:
      return "Unbounded";
    case LPStatus::kInfeasible:
      return "Infeasible";
  }
  return "?";
}

namespace {

template <class T>
struct Sign;

template <>
struct Sign<double> {
  double tol;
  bool neg(double x) const { return x < -tol; }
  bool pos(double x) const { return x > tol; }
  bool nonzero(double x) const { return std::fabs(x) > tol; }
};

template <>
struct Sign<Rational> {
  double tol;
  bool neg(const Rational& x) const { return sgn(x) < 0; }
  bool pos(const Rational& x) const { return sgn(x) > 0; }
  bool nonzero(const Rational& x) const { return sgn(x) != 0; }
};

enum class ColKind { kStructural, kSlack, kArtificial };

template <class T>
using SparseVec = std::vector<std::pair<int, T>>;

// min cᵀx  s.t.  Ax = b ≥ 0, x ≥ 0.
template <class T>
struct Standard {
  int m = 0;
  std::vector<SparseVec<T>> cols;
  std::vector<ColKind> kind;
  std::vector<std::string> names;
  std::vector<T> b;
  std::vector<T> cost;
  std::vector<int> row_sign;    // ±1
  std::vector<int> row_origin;  // original row, or -1 for an upper-bound row
  std::vector<T> offset;        // per original variable
  std::vector<SparseVec<int>> parts;  // per original variable: (column, ±1)
  std::vector<int> initial_basis;     // per row
  bool empty_box = false;
};

template <class T>
Standard<T> standardize(const LPInstance<T>& lp) {
  Standard<T> s;
  const int n = lp.num_vars();
  s.offset.assign(n, T(0));
  s.parts.resize(n);
  std::vector<std::pair<int, T>> bound_rows;  // (column, u - l)
  auto new_col = [&](std::string name, ColKind k, T cost) {
    s.cols.emplace_back();
    s.kind.push_back(k);
    s.names.push_back(std::move(name));
    s.cost.push_back(std::move(cost));
    return static_cast<int>(s.cols.size()) - 1;
  };
  for (int j = 0; j < n; ++j) {
    const T c = lp.maximize ? T(-lp.objective[j]) : lp.objective[j];
    const auto& lo = lp.lower[j];
    const auto& hi = lp.upper[j];
    if (lo) {
      s.offset[j] = *lo;
      const int col = new_col(lp.var_names[j], ColKind::kStructural, c);
      s.parts[j].push_back({col, 1});
      if (hi) {
        if (*hi < *lo) s.empty_box = true;
        bound_rows.push_back({col, T(*hi - *lo)});
      }
    } else if (hi) {
      s.offset[j] = *hi;
      const int col = new_col(lp.var_names[j] + "'", ColKind::kStructural, T(-c));
      s.parts[j].push_back({col, -1});
    } else {
      const int p = new_col(lp.var_names[j] + "+", ColKind::kStructural, c);
      const int q = new_col(lp.var_names[j] + "-", ColKind::kStructural, T(-c));
      s.parts[j].push_back({p, 1});
      s.parts[j].push_back({q, -1});
    }
  }

  std::vector<SparseVec<T>> rows;
  std::vector<int> slack_of_row;
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.rows[r];
    SparseVec<T> coefs;
    T rhs = row.rhs;
    for (const auto& [j, a] : row.coefs) {
      if (sgn(T(a)) == 0) continue;
      rhs -= a * s.offset[j];
      for (const auto& [col, sign] : s.parts[j]) coefs.push_back({col, sign > 0 ? a : T(-a)});
    }
    int slack = -1;
    if (row.rel != Relation::kEq) {
      slack = new_col("s_" + lp.row_names[r], ColKind::kSlack, T(0));
      coefs.push_back({slack, row.rel == Relation::kLe ? T(1) : T(-1)});
    }
    rows.push_back(std::move(coefs));
    s.b.push_back(rhs);
    s.row_origin.push_back(r);
    slack_of_row.push_back(slack);
  }
  for (const auto& [col, width] : bound_rows) {
    const int slack = new_col("s_ub_" + s.names[col], ColKind::kSlack, T(0));
    rows.push_back({{col, T(1)}, {slack, T(1)}});
    s.b.push_back(width);
    s.row_origin.push_back(-1);
    slack_of_row.push_back(slack);
  }
  s.m = static_cast<int>(rows.size());
  s.row_sign.assign(s.m, 1);
  s.initial_basis.assign(s.m, -1);
  for (int i = 0; i < s.m; ++i) {
    if (sgn(s.b[i]) < 0) {
      s.row_sign[i] = -1;
      s.b[i] = -s.b[i];
      for (auto& [col, a] : rows[i]) a = -a;
    }
    for (const auto& [col, a] : rows[i]) s.cols[col].push_back({i, a});
    const int sl = slack_of_row[i];
    if (sl >= 0 && s.cols[sl].back().second == T(1)) s.initial_basis[i] = sl;
  }
  for (int i = 0; i < s.m; ++i) {
    if (s.initial_basis[i] >= 0) continue;
    const int a = new_col("a" + std::to_string(i), ColKind::kArtificial, T(0));
    s.cols[a].push_back({i, T(1)});
    s.initial_basis[i] = a;
  }
  return s;
}

// Dense Gauss-Jordan inverse with partial pivoting (float refactorization).
bool invert(std::vector<double> a, int m, std::vector<double>& inv) {
  inv.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) inv[i * m + i] = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::fabs(a[r * m + c]) > std::fabs(a[piv * m + c])) piv = r;
    if (std::fabs(a[piv * m + c]) < 1e-14) return false;
    if (piv != c) {
      std::swap_ranges(a.begin() + piv * m, a.begin() + piv * m + m, a.begin() + c * m);
      std::swap_ranges(inv.begin() + piv * m, inv.begin() + piv * m + m, inv.begin() + c * m);
    }
    const double d = 1.0 / a[c * m + c];
    for (int k = 0; k < m; ++k) {
      a[c * m + k] *= d;
      inv[c * m + k] *= d;
    }
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = a[r * m + c];
      if (f == 0.0) continue;
      kernels::axpy(-f, std::span<const double>(a.data() + c * m, m),
                    std::span<double>(a.data() + r * m, m));
      kernels::axpy(-f, std::span<const double>(inv.data() + c * m, m),
                    std::span<double>(inv.data() + r * m, m));
    }
  }
  return true;
}

template <class T>
class Simplex {
 public:
  Simplex(const Standard<T>& s, const LPOptions& opt)
      : s_(s), m_(s.m), n_(static_cast<int>(s.cols.size())), sign_{opt.tolerance},
        refactor_every_(opt.refactor_every) {
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : 50L * (m_ + n_) + 10000;
    binv_.assign(static_cast<std::size_t>(m_) * m_, T(0));
    for (int i = 0; i < m_; ++i) binv_[i * m_ + i] = 1;
    basis_ = s.initial_basis;
    where_.assign(n_, -1);
    for (int i = 0; i < m_; ++i) where_[basis_[i]] = i;
    xb_ = s.b;
  }

  enum class Outcome { kOptimal, kUnbounded };

  Outcome run(const std::vector<T>& cost, const std::vector<char>& allowed) {
    cost_ = &cost;
    while (true) {
      if (++iterations_ > max_iter_)
        throw LPError("simplex cycling guard tripped after " + std::to_string(max_iter_) +
                      " iterations");
      if constexpr (!kIsExact<T>) {
        if (refactor_every_ > 0 && iterations_ % refactor_every_ == 0) refactor();
      }
      compute_duals();
      int enter = -1;
      for (int j = 0; j < n_ && enter < 0; ++j) {
        if (where_[j] >= 0 || !allowed[j]) continue;
        T d = cost[j];
        for (const auto& [i, a] : s_.cols[j]) d -= pi_[i] * a;
        if (sign_.neg(d)) enter = j;
      }
      if (enter < 0) return Outcome::kOptimal;
      column(enter, u_);
      int leave = -1;
      T best{0};
      for (int i = 0; i < m_; ++i) {
        if (!sign_.pos(u_[i])) continue;
        T ratio = xb_[i] / u_[i];
        if constexpr (!kIsExact<T>) {
          if (ratio < 0) ratio = 0;
        }
        bool take;
        if (leave < 0)
          take = true;
        else if (tie(ratio, best))
          take = basis_[i] < basis_[leave];
        else
          take = ratio < best;
        if (take) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        entering_ = enter;
        return Outcome::kUnbounded;
      }
      pivot(leave, enter);
    }
  }

  // Pivots basic artificials out where possible (degenerate pivots).
  void expel_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (s_.kind[basis_[r]] != ColKind::kArtificial) continue;
      for (int j = 0; j < n_; ++j) {
        if (where_[j] >= 0 || s_.kind[j] == ColKind::kArtificial) continue;
        T ur{0};
        for (const auto& [k, a] : s_.cols[j]) ur += binv_[r * m_ + k] * a;
        if (!sign_.nonzero(ur)) continue;
        column(j, u_);
        pivot(r, j);
        break;
      }
    }
  }

  T objective(const std::vector<T>& cost) const {
    T z{0};
    for (int i = 0; i < m_; ++i) z += cost[basis_[i]] * xb_[i];
    return z;
  }

  std::vector<T> values() const {
    std::vector<T> x(n_, T(0));
    for (int i = 0; i < m_; ++i) x[basis_[i]] = xb_[i];
    return x;
  }

  void compute_duals() {
    pi_.assign(m_, T(0));
    const auto& cost = *cost_;
    for (int i = 0; i < m_; ++i) {
      const T& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      if constexpr (kIsExact<T>) {
        for (int k = 0; k < m_; ++k) pi_[k] += cb * binv_[i * m_ + k];
      } else {
        kernels::axpy(cb, std::span<const double>(binv_.data() + i * m_, m_), pi_);
      }
    }
  }

  const std::vector<T>& duals() const { return pi_; }
  const std::vector<T>& direction() const { return u_; }
  int entering() const { return entering_; }
  const std::vector<int>& basis() const { return basis_; }
  long iterations() const { return iterations_; }

 private:
  bool tie(const T& a, const T& b) const {
    if constexpr (kIsExact<T>) {
      return a == b;
    } else {
      return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(b));
    }
  }

  void column(int j, std::vector<T>& u) const {
    u.assign(m_, T(0));
    for (const auto& [k, a] : s_.cols[j])
      for (int i = 0; i < m_; ++i) u[i] += binv_[i * m_ + k] * a;
  }

  void pivot(int r, int j) {
    const T ur = u_[r];
    const T theta = xb_[r] / ur;
    for (int i = 0; i < m_; ++i)
      if (i != r && sgn(u_[i]) != 0) xb_[i] -= theta * u_[i];
    xb_[r] = theta;
    T* row_r = binv_.data() + r * m_;
    if constexpr (kIsExact<T>) {
      for (int k = 0; k < m_; ++k) row_r[k] /= ur;
      for (int i = 0; i < m_; ++i) {
        if (i == r || sgn(u_[i]) == 0) continue;
        T* row_i = binv_.data() + i * m_;
        for (int k = 0; k < m_; ++k)
          if (sgn(row_r[k]) != 0) row_i[k] -= u_[i] * row_r[k];
      }
    } else {
      const std::span<double> rr(row_r, m_);
      kernels::axpby(0.0, rr, 1.0 / ur, rr);
      for (int i = 0; i < m_; ++i) {
        if (i == r || u_[i] == 0.0) continue;
        kernels::axpy(-u_[i], rr, std::span<double>(binv_.data() + i * m_, m_));
      }
    }
    where_[basis_[r]] = -1;
    basis_[r] = j;
    where_[j] = r;
  }

  void refactor() {
    if constexpr (!kIsExact<T>) {
      std::vector<double> bm(static_cast<std::size_t>(m_) * m_, 0.0);
      for (int i = 0; i < m_; ++i)
        for (const auto& [k, a] : s_.cols[basis_[i]]) bm[k * m_ + i] = a;
      std::vector<double> inv;
      if (!invert(std::move(bm), m_, inv)) throw LPError("singular basis during refactorization");
      binv_ = std::move(inv);
      std::vector<double> xb(m_, 0.0);
      kernels::matvec(binv_, m_, m_, s_.b, xb);
      for (auto& v : xb)
        if (v < 0 && v > -1e-11) v = 0;
      xb_ = std::move(xb);
    }
  }

  const Standard<T>& s_;
  int m_;
  int n_;
  Sign<T> sign_;
  int refactor_every_;
  long max_iter_ = 0;
  long iterations_ = 0;
  std::vector<T> binv_;
  std::vector<int> basis_;
  std::vector<int> where_;
  std::vector<T> xb_;
  std::vector<T> pi_;
  std::vector<T> u_;
  const std::vector<T>* cost_ = nullptr;
  int entering_ = -1;
};

template <class T>
std::vector<T> to_original(const Standard<T>& s, const std::vector<T>& xs, bool with_offset) {
  std::vector<T> x(s.parts.size(), T(0));
  for (std::size_t j = 0; j < s.parts.size(); ++j) {
    x[j] = with_offset ? s.offset[j] : T(0);
    for (const auto& [col, sign] : s.parts[j]) {
      if (sign > 0)
        x[j] += xs[col];
      else
        x[j] -= xs[col];
    }
  }
  return x;
}

}  // namespace

template <class T>
LPSolution<T> solve_lp(const LPInstance<T>& lp, const LPOptions& options) {
  for (const auto& row : lp.rows)
    for (const auto& [j, a] : row.coefs)
      if (j < 0 || j >= lp.num_vars()) throw LPError("row references an unknown variable");
  const Standard<T> s = standardize(lp);
  LPSolution<T> sol;
  if (s.empty_box) {
    sol.status = LPStatus::kInfeasible;
    sol.farkas.assign(lp.num_rows(), T(0));
    return sol;
  }
  Simplex<T> sx(s, options);
  const int n = static_cast<int>(s.cols.size());

  std::vector<T> phase1(n, T(0));
  bool any_artificial = false;
  for (int j = 0; j < n; ++j)
    if (s.kind[j] == ColKind::kArtificial) {
      phase1[j] = 1;
      any_artificial = true;
    }
  if (any_artificial) {
    sx.run(phase1, std::vector<char>(n, 1));
    const T infeas = sx.objective(phase1);
    const Sign<T> sign{options.tolerance * std::max(1.0, static_cast<double>(s.m))};
    if (sign.pos(infeas)) {
      sx.compute_duals();
      sol.status = LPStatus::kInfeasible;
      sol.farkas.assign(lp.num_rows(), T(0));
      for (int i = 0; i < s.m; ++i)
        if (s.row_origin[i] >= 0)
          sol.farkas[s.row_origin[i]] = s.row_sign[i] > 0 ? sx.duals()[i] : T(-sx.duals()[i]);
      sol.iterations = sx.iterations();
      return sol;
    }
    sx.expel_artificials();
  }

  std::vector<char> allowed(n, 1);
  for (int j = 0; j < n; ++j) allowed[j] = s.kind[j] != ColKind::kArtificial;
  const auto outcome = sx.run(s.cost, allowed);
  sol.iterations = sx.iterations();
  for (int b : sx.basis()) sol.basis.push_back(s.names[b]);
  if (outcome == Simplex<T>::Outcome::kUnbounded) {
    sol.status = LPStatus::kUnbounded;
    std::vector<T> d(n, T(0));
    d[sx.entering()] = 1;
    for (int i = 0; i < s.m; ++i) d[sx.basis()[i]] -= sx.direction()[i];
    sol.ray = to_original(s, d, false);
    return sol;
  }
  sol.status = LPStatus::kOptimal;
  sol.x = to_original(s, sx.values(), true);
  sol.objective = 0;
  for (int j = 0; j < lp.num_vars(); ++j) sol.objective += lp.objective[j] * sol.x[j];
  sx.compute_duals();
  sol.duals.assign(lp.num_rows(), T(0));
  for (int i = 0; i < s.m; ++i) {
    if (s.row_origin[i] < 0) continue;
    T y = sx.duals()[i];
    if ((s.row_sign[i] < 0) != lp.maximize) y = -y;
    sol.duals[s.row_origin[i]] = y;
  }
  return sol;
}

namespace {

template <class T>
double dbl(const T& x) {
  return to_double(x);
}

}  // namespace

template <class T>
bool check_farkas(const LPInstance<T>& lp, const std::vector<T>& y, double tol) {
  if (static_cast<int>(y.size()) != lp.num_rows()) return false;
  const Sign<T> sign{tol};
  std::vector<T> aty(lp.num_vars(), T(0));
  T yb{0};
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.rows[r];
    if (row.rel == Relation::kGe && sign.neg(y[r])) return false;
    if (row.rel == Relation::kLe && sign.pos(y[r])) return false;
    for (const auto& [j, a] : row.coefs) aty[j] += y[r] * a;
    yb += y[r] * row.rhs;
  }
  T max_val{0};
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] && lp.upper[j] && *lp.upper[j] < *lp.lower[j]) return true;
    if (sign.pos(aty[j])) {
      if (!lp.upper[j]) return false;
      max_val += aty[j] * *lp.upper[j];
    } else if (sign.neg(aty[j])) {
      if (!lp.lower[j]) return false;
      max_val += aty[j] * *lp.lower[j];
    }
  }
  return sign.pos(T(yb - max_val));
}

template <class T>
bool check_ray(const LPInstance<T>& lp, const std::vector<T>& d, double tol) {
  if (static_cast<int>(d.size()) != lp.num_vars()) return false;
  const Sign<T> sign{tol};
  for (const auto& row : lp.rows) {
    T ad{0};
    for (const auto& [j, a] : row.coefs) ad += a * d[j];
    if (row.rel != Relation::kLe && sign.neg(ad)) return false;
    if (row.rel != Relation::kGe && sign.pos(ad)) return false;
  }
  T cd{0};
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] && sign.neg(d[j])) return false;
    if (lp.upper[j] && sign.pos(d[j])) return false;
    cd += lp.objective[j] * d[j];
  }
  return lp.maximize ? sign.pos(cd) : sign.neg(cd);
}

template <class T>
double primal_residual(const LPInstance<T>& lp, const std::vector<T>& x) {
  double worst = 0.0;
  for (const auto& row : lp.rows) {
    T ax{0};
    for (const auto& [j, a] : row.coefs) ax += a * x[j];
    const double diff = dbl(T(ax - row.rhs));
    if (row.rel != Relation::kLe) worst = std::max(worst, -diff);
    if (row.rel != Relation::kGe) worst = std::max(worst, diff);
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j]) worst = std::max(worst, dbl(T(*lp.lower[j] - x[j])));
    if (lp.upper[j]) worst = std::max(worst, dbl(T(x[j] - *lp.upper[j])));
  }
  return worst;
}

namespace {

std::string fmt(double x) { return format_double(x); }
std::string fmt(const Rational& x) { return format_rational(x); }

}  // namespace

template <class T>
std::string dump_lp(const LPInstance<T>& lp) {
  std::ostringstream os;
  os << (lp.maximize ? "maximize:" : "minimize:");
  for (int j = 0; j < lp.num_vars(); ++j)
    if (sgn(T(lp.objective[j])) != 0) os << " " << fmt(lp.objective[j]) << " " << lp.var_names[j];
  os << "\n";
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.rows[r];
    os << lp.row_names[r] << ":";
    for (const auto& [j, a] : row.coefs) os << " " << fmt(a) << " " << lp.var_names[j];
    os << (row.rel == Relation::kLe ? " <= " : row.rel == Relation::kEq ? " = " : " >= ")
       << fmt(row.rhs) << "\n";
  }
  for (int j = 0; j < lp.num_vars(); ++j)
    os << "bound " << lp.var_names[j] << " " << (lp.lower[j] ? fmt(*lp.lower[j]) : "-inf") << " "
       << (lp.upper[j] ? fmt(*lp.upper[j]) : "inf") << "\n";
  return os.str();
}

LPInstance<double> to_float(const LPInstance<Rational>& lp) {
  LPInstance<double> out;
  out.maximize = lp.maximize;
  out.var_names = lp.var_names;
  out.row_names = lp.row_names;
  for (const auto& c : lp.objective) out.objective.push_back(c.get_d());
  for (const auto& l : lp.lower) out.lower.push_back(l ? std::optional<double>(l->get_d()) : std::nullopt);
  for (const auto& u : lp.upper) out.upper.push_back(u ? std::optional<double>(u->get_d()) : std::nullopt);
  for (const auto& row : lp.rows) {
    LPRow<double> r;
    r.rel = row.rel;
    r.rhs = row.rhs.get_d();
    for (const auto& [j, a] : row.coefs) r.coefs.push_back({j, a.get_d()});
    out.rows.push_back(std::move(r));
  }
  return out;
}

#define EFPCE_INSTANTIATE(T)                                                            \
  template LPSolution<T> solve_lp<T>(const LPInstance<T>&, const LPOptions&);           \
  template bool check_farkas<T>(const LPInstance<T>&, const std::vector<T>&, double);   \
  template bool check_ray<T>(const LPInstance<T>&, const std::vector<T>&, double);      \
  template double primal_residual<T>(const LPInstance<T>&, const std::vector<T>&);      \
  template std::string dump_lp<T>(const LPInstance<T>&);

EFPCE_INSTANTIATE(double)
EFPCE_INSTANTIATE(Rational)

#undef EFPCE_INSTANTIATE

}  // namespace efpce
