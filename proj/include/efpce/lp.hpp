#pragma once

// Revised simplex with Bland's rule and an explicit dense basis inverse.
// Instantiated for double (float mode) and Rational (exact mode).

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "efpce/numeric.hpp"

namespace efpce {

enum class Relation { kLe, kEq, kGe };
enum class LPStatus { kOptimal, kUnbounded, kInfeasible };

const char* to_string(LPStatus s);

class LPError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct LPRow {
  std::vector<std::pair<int, T>> coefs;
  Relation rel = Relation::kGe;
  T rhs{0};
};

template <class T>
struct LPInstance {
  bool maximize = true;
  std::vector<T> objective;
  std::vector<std::optional<T>> lower;  // nullopt = -inf
  std::vector<std::optional<T>> upper;  // nullopt = +inf
  std::vector<std::string> var_names;
  std::vector<LPRow<T>> rows;
  std::vector<std::string> row_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(std::string name, std::optional<T> lo = T(0), std::optional<T> hi = std::nullopt,
              T obj = T(0)) {
    objective.push_back(std::move(obj));
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    var_names.push_back(std::move(name));
    return num_vars() - 1;
  }
  int add_row(std::vector<std::pair<int, T>> coefs, Relation rel, T rhs, std::string name = {}) {
    rows.push_back(LPRow<T>{std::move(coefs), rel, std::move(rhs)});
    row_names.push_back(name.empty() ? "r" + std::to_string(rows.size() - 1) : std::move(name));
    return num_rows() - 1;
  }
};

template <class T>
struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  std::vector<T> x;       // primal values (Optimal)
  std::vector<T> duals;   // per row (Optimal), sign convention of the objective sense
  T objective{0};
  std::vector<std::string> basis;  // basic standard-form columns, in basis order
  std::vector<T> ray;     // Unbounded: improving direction in original variables
  std::vector<T> farkas;  // Infeasible: row multipliers (see check_farkas)
  long iterations = 0;
};

struct LPOptions {
  long max_iterations = 0;  // 0 = automatic cycling guard
  double tolerance = 1e-9;  // float mode only
  int refactor_every = 64;  // float mode only
};

/// Throws LPError on a cycling-guard trip or a singular basis.
template <class T>
LPSolution<T> solve_lp(const LPInstance<T>& lp, const LPOptions& options = {});

/// y certifies infeasibility when its signs match the row relations
/// (y ≥ 0 on ≥ rows, y ≤ 0 on ≤ rows) and max_{x in bounds} (Aᵀy)ᵀx < yᵀb.
template <class T>
bool check_farkas(const LPInstance<T>& lp, const std::vector<T>& y, double tol = 1e-9);

/// d is a recession direction of the feasible set that improves the objective.
template <class T>
bool check_ray(const LPInstance<T>& lp, const std::vector<T>& d, double tol = 1e-9);

/// Max violation of rows and bounds at x.
template <class T>
double primal_residual(const LPInstance<T>& lp, const std::vector<T>& x);

/// Plain-text dump: objective line, then one constraint per line.
template <class T>
std::string dump_lp(const LPInstance<T>& lp);

LPInstance<double> to_float(const LPInstance<Rational>& lp);

/// Exact mode is chosen for rational data with at most this many variables.
inline constexpr int kExactVariableLimit = 5000;

}  // namespace efpce
