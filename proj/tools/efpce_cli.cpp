// efpce: solve for and verify correlated equilibria of extensive-form games.
//
//   efpce info     --game G
//   efpce solve    --game G [--concept efce|efpce] [--method dense|eah|auto] [--out D]
//   efpce verify   --game G --dist D [--concept efce|efpce]
//   efpce generate --seed N [--out G]
//
// Exit codes: 0 pass, 2 failed or unstable evidence, 1 input error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "efpce/corpus.hpp"
#include "efpce/game_format.hpp"
#include "efpce/trembling.hpp"

using namespace efpce;

namespace {

constexpr int kPass = 0;
constexpr int kInputError = 1;
constexpr int kFail = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string game_path;
  std::string dist_path;
  std::string solution_concept = "efpce";
  std::string method = "auto";
  std::string eps;
  std::vector<std::string> trembles;
  bool exact = false;
  std::string trace_eah;
  std::string dump_lp;
  std::string dump_system;
  std::uint64_t profile_cap = kDefaultProfileCap;
  std::string out;
  std::string report;
  std::string tsv;
  int window = 3;
  std::uint64_t seed = 1;
  CorpusOptions corpus;
};

std::string slurp(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path))
    throw InputError(std::string("no such ") + what + " file: " + path);
  return read_file(path);
}

Game load_game(const RunConfig& c) {
  const auto text = slurp(c.game_path, "game");
  try {
    return parse_game(text);
  } catch (const FormatError& e) {
    throw InputError(c.game_path + ":" + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

TrembleSchedule schedule_for(const Game& game, const RunConfig& c) {
  auto s = TrembleSchedule::uniform(game);
  for (const auto& spec : c.trembles) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw InputError("tremble must be ACTION=COEF[^DEG]: " + spec);
    const auto label = spec.substr(0, eq);
    const auto action = game.find_action(label);
    if (!action) throw InputError("unknown action in --tremble: " + label);
    auto rest = spec.substr(eq + 1);
    Tremble t;
    const auto hat = rest.find('^');
    try {
      if (hat != std::string::npos) {
        t.degree = std::stoi(rest.substr(hat + 1));
        rest = rest.substr(0, hat);
      }
      t.coef = parse_exact(rest);
      s.set(*action, t);
    } catch (const std::exception& e) {
      throw InputError("bad --tremble " + spec + ": " + e.what());
    }
  }
  return s;
}

HomotopyConfig homotopy_for(const RunConfig& c) {
  HomotopyConfig h;
  try {
    if (!c.eps.empty()) h.grid = parse_grid(c.eps);
    h.method = parse_method(c.method);
    h.window = c.window;
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (c.exact) {
    h.exact = true;
    h.verify.exact = true;
  }
  h.profile_cap = c.profile_cap;
  return h;
}

void emit(const RunConfig& c, const std::string& text) {
  std::cout << text;
  if (!c.report.empty()) write_file(c.report, text);
}

int cmd_info(const RunConfig& c) {
  const Game g = load_game(c);
  std::ostringstream os;
  os << "game " << g.name() << "\n";
  os << "players=" << g.num_players();
  for (int p = 0; p < g.num_players(); ++p)
    os << ", |Π" << p + 1 << "|=" << count_strategies(g, p);
  os << ", |Π|=" << count_strategies(g, -1) << "\n";
  os << "nodes=" << g.num_nodes() << " terminals=" << g.num_terminals()
     << " infosets=" << g.num_infosets() << "\n";
  os << "infoset\tplayer\tactions\tnodes\tparent\n";
  for (int I = 0; I < g.num_infosets(); ++I) {
    const auto& info = g.infoset(I);
    os << info.label << "\t" << info.player + 1 << "\t";
    for (std::size_t k = 0; k < info.actions.size(); ++k) os << (k ? "," : "") << info.actions[k];
    os << "\t" << info.members.size() << "\t"
       << (info.parent_seq < 0 ? std::string("-") : g.action_label(info.parent_seq)) << "\n";
  }
  const auto sys = build_efce_system<double>(g);
  os << "rows=" << sys.num_rows() << " v_columns=" << sys.num_v()
     << " w_columns=" << sys.num_rows() << "\n";
  emit(c, os.str());
  return kPass;
}

void dump_artifacts(const RunConfig& c, const Game& g, const TrembleSchedule& s,
                    const HomotopyConfig& h, bool efce) {
  if (c.dump_lp.empty() && c.dump_system.empty()) return;
  const Rational eps = efce ? Rational(0) : h.grid.back();
  const auto sys = efce ? build_efce_system<Rational>(g) : build_perturbed_system<Rational>(g, s, eps);
  const auto columns = enumerate_profiles(g, c.profile_cap);
  if (!c.dump_lp.empty()) write_file(c.dump_lp, dump_lp(build_master<Rational>({&sys}, columns)));
  if (!c.dump_system.empty()) write_file(c.dump_system, sys.dump_tsv(columns));
}

int cmd_solve(const RunConfig& c) {
  const Game g = load_game(c);
  const auto s = schedule_for(g, c);
  auto h = homotopy_for(c);
  std::ofstream trace;
  if (!c.trace_eah.empty()) {
    trace.open(c.trace_eah);
    if (!trace) throw InputError("cannot write " + c.trace_eah);
    h.eah_trace = &trace;
  }
  const bool efce = c.solution_concept == "efce";
  dump_artifacts(c, g, s, h, efce);
  bool pass;
  JointDistribution mu;
  std::ostringstream os;
  if (efce) {
    const auto r = solve_efce(g, h);
    mu = r.mu;
    pass = r.report.pass;
    os << "method: " << to_string(r.solve.method) << (r.solve.exact ? " (exact)" : " (float)")
       << "\n";
    if (!r.solve.fallback_reason.empty()) os << "eah fallback: " << r.solve.fallback_reason << "\n";
    os << r.report.text(g) << "candidate:\n" << serialize_distribution(mu, g);
  } else {
    const auto r = solve_efpce(g, s, h);
    mu = r.mu;
    pass = r.certificate.verdict == Verdict::kEvidence;
    for (const auto& p : r.path) {
      os << "eps=" << format_rational(p.eps) << "  method=" << to_string(p.method)
         << (p.exact ? " (exact)" : " (float)") << "  support=" << p.support.size();
      if (p.eah) os << "  eah_iterations=" << p.eah->iterations << "/" << p.eah->cap;
      os << "\n";
      if (!p.fallback_reason.empty()) os << "  eah fallback: " << p.fallback_reason << "\n";
    }
    os << r.certificate.text(g);
  }
  if (!c.out.empty()) write_file(c.out, serialize_distribution(mu, g));
  emit(c, os.str());
  return pass ? kPass : kFail;
}

int cmd_verify(const RunConfig& c) {
  const Game g = load_game(c);
  const auto s = schedule_for(g, c);
  const auto h = homotopy_for(c);
  JointDistribution mu;
  try {
    mu = parse_distribution(slurp(c.dist_path, "distribution"), g);
  } catch (const FormatError& e) {
    throw InputError(c.dist_path + ":" + e.what());
  }
  std::ostringstream os;
  bool pass;
  if (c.solution_concept == "efce") {
    const auto r = efce_check(g, mu, h.verify);
    pass = r.pass;
    os << r.text(g);
    if (!c.tsv.empty()) write_file(c.tsv, r.tsv(g));
  } else {
    const auto cert = efpce_evidence(g, mu, s, h.grid, h.verify);
    pass = cert.verdict == Verdict::kEvidence;
    os << cert.text(g);
    for (const auto& r : cert.reports)
      if (!r.pass) {
        os << "\nfirst failing check:\n" << r.text(g);
        if (!c.tsv.empty()) write_file(c.tsv, r.tsv(g));
        break;
      }
    if (cert.efce && !cert.efce->pass) os << "\n" << cert.efce->text(g);
  }
  emit(c, os.str());
  return pass ? kPass : kFail;
}

int cmd_generate(const RunConfig& c) {
  const Game g = random_game(c.seed, c.corpus);
  const auto text = serialize_game(g);
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated equilibria (EFCE / EFPCE) of extensive-form games"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_game = [&](CLI::App* sub) {
    sub->add_option("--game", c.game_path, "game file (.efg)")->required();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--concept", c.solution_concept, "efce or efpce")
        ->check(CLI::IsMember({"efce", "efpce"}));
    sub->add_option("--eps", c.eps, "epsilon grid: comma list or geo(start,ratio,count)");
    sub->add_option("--tremble", c.trembles, "per-action tremble ACTION=COEF[^DEG]");
    sub->add_flag("--exact", c.exact, "force rational arithmetic");
    sub->add_option("--profile-cap", c.profile_cap, "maximum number of enumerated profiles");
    sub->add_option("--report", c.report, "write the report to a file");
    sub->add_option("--window", c.window, "stabilization window");
  };

  auto* info = app.add_subcommand("info", "print game statistics");
  add_game(info);
  info->add_option("--report", c.report, "write the report to a file");

  auto* solve = app.add_subcommand("solve", "compute an EFCE or an EFPCE candidate");
  add_game(solve);
  add_solver(solve);
  solve->add_option("--method", c.method, "dense, eah or auto")
      ->check(CLI::IsMember({"dense", "eah", "auto"}));
  solve->add_option("--out", c.out, "write the candidate distribution");
  solve->add_option("--trace-eah", c.trace_eah, "per-iteration ellipsoid trace (TSV)");
  solve->add_option("--dump-lp", c.dump_lp, "write the dense LP at the smallest epsilon");
  solve->add_option("--dump-system", c.dump_system, "write the constraint system (TSV)");

  auto* verify = app.add_subcommand("verify", "check a distribution");
  add_game(verify);
  add_solver(verify);
  verify->add_option("--dist", c.dist_path, "distribution file (.dist)")->required();
  verify->add_option("--tsv", c.tsv, "write per-query values (TSV)");

  auto* generate = app.add_subcommand("generate", "write a random game");
  generate->add_option("--seed", c.seed, "random seed");
  generate->add_option("--players", c.corpus.players, "number of players");
  generate->add_option("--depth", c.corpus.max_depth, "maximum depth");
  generate->add_option("--actions", c.corpus.max_actions, "maximum actions per infoset");
  generate->add_option("--out", c.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInputError;
  }

  try {
    if (*info) return cmd_info(c);
    if (*solve) return cmd_solve(c);
    if (*verify) return cmd_verify(c);
    if (*generate) return cmd_generate(c);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const EpsilonRangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
