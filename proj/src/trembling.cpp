#include "efpce/trembling.hpp"

#include <algorithm>
#include <stdexcept>

namespace efpce {

namespace {

bool choose_exact(const Game& game, const HomotopyConfig& config, std::uint64_t vars) {
  if (config.exact) return *config.exact;
  return game.exact() && vars <= static_cast<std::uint64_t>(kExactVariableLimit);
}

Method resolve(const Game& game, Method m) {
  if (m != Method::kAuto) return m;
  return count_strategies(game, -1) <= kAutoDenseProfiles ? Method::kDense : Method::kEah;
}

template <class T>
ConstraintSystem<T> system_at(const Game& game, const TrembleSchedule* schedule,
                              const Rational& eps) {
  if (!schedule) return build_efce_system<T>(game);
  return build_perturbed_system<T>(game, *schedule, eps);
}

// Solves the restricted master over `columns` with one block per ε; a block
// at ε = 0 is the unperturbed system.
template <class T>
MasterResult<T> master_over(const Game& game, const TrembleSchedule& schedule,
                            const std::vector<Rational>& eps_list,
                            const std::vector<PureProfile>& columns, const LPOptions& lp) {
  std::vector<ConstraintSystem<T>> systems;
  systems.reserve(eps_list.size());
  for (const auto& e : eps_list)
    systems.push_back(e == 0 ? build_efce_system<T>(game) : system_at<T>(game, &schedule, e));
  std::vector<const ConstraintSystem<T>*> blocks;
  for (const auto& s : systems) blocks.push_back(&s);
  return solve_master<T>(blocks, columns, lp);
}

template <class T>
void dense_solve(const Game& game, const TrembleSchedule* schedule, const Rational& eps,
                 const HomotopyConfig& config, GridSolve& out) {
  const auto sys = system_at<T>(game, schedule, eps);
  const auto columns = enumerate_profiles(game, config.profile_cap);
  const auto res = solve_master<T>({&sys}, columns, config.lp);
  if (!res.feasible)
    throw std::runtime_error("incentive system infeasible at eps=" + format_rational(eps) +
                             " (status " + to_string(res.status) + "); this indicates a solver bug");
  out.mu = res.mu;
}

template <class T>
void eah_run(const Game& game, const TrembleSchedule* schedule, const Rational& eps,
             const HomotopyConfig& config, std::vector<PureProfile>* pool, GridSolve& out) {
  const auto sys = system_at<T>(game, schedule, eps);
  const auto fsys = system_at<double>(game, schedule, eps);
  EahOptions opt;
  opt.lp = config.lp;
  opt.trace = config.eah_trace;
  if (pool) opt.initial_pool = *pool;
  auto res = eah_solve<T>(sys, fsys, opt);
  out.mu = res.master.mu;
  out.eah = res.stats;
  if (pool) *pool = std::move(res.pool);
}

double support_threshold(bool exact) { return exact ? 0.0 : 1e-9; }

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kDense:
      return "dense";
    case Method::kEah:
      return "eah";
    case Method::kAuto:
      return "auto";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "dense") return Method::kDense;
  if (text == "eah") return Method::kEah;
  if (text == "auto") return Method::kAuto;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::vector<Rational> HomotopyConfig::default_grid() {
  std::vector<Rational> g;
  Rational e(1, 10);
  for (int k = 0; k < 8; ++k, e /= 10) g.push_back(e);
  return g;
}

void HomotopyConfig::validate() const {
  if (grid.empty()) throw std::invalid_argument("epsilon grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= 0) throw std::invalid_argument("epsilon grid values must be positive");
    if (k > 0 && grid[k] >= grid[k - 1])
      throw std::invalid_argument("epsilon grid must be strictly decreasing");
  }
  if (window < 2) throw std::invalid_argument("stabilization window must be at least 2");
}

std::vector<Rational> parse_grid(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  auto split = [&](std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k)
      if (k == s.size() || s[k] == ',') {
        parts.push_back(trim(s.substr(start, k - start)));
        start = k + 1;
      }
    return parts;
  };
  text = trim(text);
  std::vector<Rational> out;
  if (text.substr(0, 4) == "geo(") {
    if (text.back() != ')') throw std::invalid_argument("geo(...) is missing ')'");
    const auto parts = split(text.substr(4, text.size() - 5));
    if (parts.size() != 3) throw std::invalid_argument("geo needs start, ratio and count");
    Rational e = parse_exact(parts[0]);
    const Rational ratio = parse_exact(parts[1]);
    const long count = std::stol(std::string(parts[2]));
    if (count < 1) throw std::invalid_argument("geo count must be positive");
    for (long k = 0; k < count; ++k, e *= ratio) out.push_back(e);
  } else {
    for (auto p : split(text)) out.push_back(parse_exact(p));
  }
  HomotopyConfig probe;
  probe.grid = out;
  probe.validate();
  return out;
}

GridSolve solve_at(const Game& game, const TrembleSchedule* schedule, const Rational& eps,
                   const HomotopyConfig& config, std::vector<PureProfile>* pool) {
  GridSolve out;
  out.eps = eps;
  out.method = resolve(game, config.method);
  if (out.method == Method::kEah) {
    out.exact = choose_exact(game, config, 0);
    try {
      if (out.exact)
        eah_run<Rational>(game, schedule, eps, config, pool, out);
      else
        eah_run<double>(game, schedule, eps, config, pool, out);
    } catch (const std::exception& e) {
      out.fallback_reason = e.what();
      out.method = Method::kDense;
    }
  }
  if (out.method == Method::kDense) {
    const std::uint64_t profiles = count_strategies(game, -1);
    const std::uint64_t vars = profiles + 2 * static_cast<std::uint64_t>(count_rows(game));
    out.exact = choose_exact(game, config, vars);
    if (out.exact)
      dense_solve<Rational>(game, schedule, eps, config, out);
    else
      dense_solve<double>(game, schedule, eps, config, out);
  }
  out.support = support_of(out.mu, support_threshold(out.exact));
  return out;
}

EfpceResult solve_efpce(const Game& game, const TrembleSchedule& schedule,
                        const HomotopyConfig& config) {
  config.validate();
  for (const auto& e : config.grid)
    if (!schedule.valid(game, e))
      throw EpsilonRangeError("epsilon " + format_rational(e) +
                              " is outside the tremble schedule's validity range");

  EfpceResult res;
  auto& cert = res.certificate;
  cert.grid = config.grid;
  std::vector<PureProfile> pool;
  const int window = config.window;
  int stable = -1;
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    res.path.push_back(solve_at(game, &schedule, config.grid[k], config, &pool));
    const int kk = static_cast<int>(k);
    if (kk + 1 < window) continue;
    bool same = true;
    for (int j = kk - window + 2; j <= kk; ++j)
      if (res.path[j].support != res.path[kk - window + 1].support) same = false;
    if (same) {
      stable = kk - window + 1;
      break;
    }
  }

  const auto check_from = [&](int first) {
    cert.reports.clear();
    for (std::size_t k = first; k < config.grid.size(); ++k)
      cert.reports.push_back(
          perturbed_ne_check(game, cert.candidate, schedule, config.grid[k], config.verify));
    cert.efce = efce_check(game, cert.candidate, config.verify);
    cert.first_failure.reset();
    for (const auto& r : cert.reports)
      if (!r.pass) {
        cert.first_failure = r.eps;
        break;
      }
    return !cert.first_failure && cert.efce->pass;
  };

  if (stable < 0) {
    cert.candidate = res.path.back().mu;
    cert.support = res.path.back().support;
    check_from(0);
    cert.verdict = Verdict::kUnstable;
    res.mu = cert.candidate;
    return res;
  }

  cert.stabilized_at = stable;
  cert.support = res.path[stable].support;
  const bool exact = choose_exact(game, config, cert.support.size() * (config.grid.size() + 1) +
                                                    4 * static_cast<std::uint64_t>(count_rows(game)));
  std::vector<Rational> blocks{config.grid.back()};
  bool ok = false;
  for (std::size_t round = 0; round <= config.grid.size() + 1; ++round) {
    JointDistribution mu;
    bool feasible;
    if (exact) {
      auto m = master_over<Rational>(game, schedule, blocks, cert.support, config.lp);
      feasible = m.feasible;
      mu = std::move(m.mu);
    } else {
      auto m = master_over<double>(game, schedule, blocks, cert.support, config.lp);
      feasible = m.feasible;
      mu = std::move(m.mu);
    }
    if (!feasible) break;
    cert.candidate = std::move(mu);
    res.joint_blocks = static_cast<int>(blocks.size());
    if (check_from(stable)) {
      ok = true;
      break;
    }
    // Add the failing ε (or the unperturbed block) and re-solve.
    std::optional<Rational> add;
    for (const auto& r : cert.reports)
      if (!r.pass && std::find(blocks.begin(), blocks.end(), r.eps) == blocks.end()) {
        add = r.eps;
        break;
      }
    if (!add && !cert.efce->pass &&
        std::find(blocks.begin(), blocks.end(), Rational(0)) == blocks.end())
      add = Rational(0);
    if (!add) break;
    blocks.push_back(*add);
  }
  if (cert.candidate.entries.empty()) {
    cert.candidate = res.path.back().mu;
    check_from(stable);
  }
  cert.verdict = ok ? Verdict::kEvidence : Verdict::kFailed;
  res.mu = cert.candidate;
  return res;
}

EfceResult solve_efce(const Game& game, const HomotopyConfig& config) {
  EfceResult res;
  res.solve = solve_at(game, nullptr, Rational(0), config);
  res.mu = res.solve.mu;
  res.report = efce_check(game, res.mu, config.verify);
  return res;
}

}  // namespace efpce
