#include "efpce/game_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace efpce {

FormatError::FormatError(int line, int column, const std::string& message)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " +
                                        message
                                  : message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t end = std::min(line.find('#'), line.size());
  while (i < end) {
    while (i < end && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= end) break;
    const std::size_t start = i;
    while (i < end && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

bool is_label(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.'))
      return false;
  return true;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find('\n', start);
    const std::size_t len = (pos == std::string_view::npos ? text.size() : pos) - start;
    ++line_no;
    f(line_no, text.substr(start, len));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

// "key=value" with an expected key.
std::string keyed(const Token& tok, const std::string& key, int line) {
  if (tok.text.rfind(key + "=", 0) != 0)
    throw FormatError(line, tok.column, "expected " + key + "=...");
  return tok.text.substr(key.size() + 1);
}

Number number_at(const std::string& text, int line, int column) {
  try {
    return parse_number(text);
  } catch (const std::invalid_argument& e) {
    throw FormatError(line, column, e.what());
  }
}

}  // namespace

GameSpec parse_game_spec(std::string_view text) {
  GameSpec spec;
  bool have_header = false;
  for_each_line(text, [&](int ln, std::string_view line) {
    const auto toks = tokenize(line);
    if (toks.empty()) return;
    const std::string& kw = toks[0].text;
    auto need = [&](std::size_t n) {
      if (toks.size() != n)
        throw FormatError(ln, toks.size() > n ? toks[n].column : static_cast<int>(line.size()) + 1,
                          kw + " record expects " + std::to_string(n - 1) + " fields");
    };
    if (kw == "game") {
      if (have_header) throw FormatError(ln, 1, "duplicate game record");
      need(3);
      spec.name = toks[1].text;
      const std::string n = keyed(toks[2], "players", ln);
      try {
        std::size_t used = 0;
        spec.players = std::stoi(n, &used);
        if (used != n.size() || spec.players < 1) throw std::invalid_argument(n);
      } catch (const std::exception&) {
        throw FormatError(ln, toks[2].column, "invalid player count '" + n + "'");
      }
      have_header = true;
      return;
    }
    if (!have_header) throw FormatError(ln, 1, "first record must be 'game'");
    if (kw == "infoset") {
      need(4);
      GameSpec::InfosetDecl d;
      d.line = ln;
      d.label = toks[1].text;
      if (!is_label(d.label)) throw FormatError(ln, toks[1].column, "invalid label");
      const std::string p = keyed(toks[2], "player", ln);
      try {
        std::size_t used = 0;
        d.player = std::stoi(p, &used) - 1;
        if (used != p.size()) throw std::invalid_argument(p);
      } catch (const std::exception&) {
        throw FormatError(ln, toks[2].column, "invalid player '" + p + "'");
      }
      if (d.player < 0 || d.player >= spec.players)
        throw FormatError(ln, toks[2].column, "player " + p + " out of range");
      d.actions = split(keyed(toks[3], "actions", ln), ',');
      for (const auto& a : d.actions)
        if (!is_label(a)) throw FormatError(ln, toks[3].column, "invalid action label '" + a + "'");
      spec.infosets.push_back(std::move(d));
    } else if (kw == "node") {
      need(3);
      GameSpec::NodeDecl d;
      d.line = ln;
      d.kind = NodeKind::kDecision;
      d.path = toks[1].text;
      d.infoset = keyed(toks[2], "infoset", ln);
      spec.nodes.push_back(std::move(d));
    } else if (kw == "chance") {
      if (toks.size() < 3) throw FormatError(ln, 1, "chance record needs outcomes");
      GameSpec::NodeDecl d;
      d.line = ln;
      d.kind = NodeKind::kChance;
      d.path = toks[1].text;
      for (std::size_t k = 2; k < toks.size(); ++k) {
        const auto colon = toks[k].text.find(':');
        if (colon == std::string::npos)
          throw FormatError(ln, toks[k].column, "expected <action>:<probability>");
        const std::string a = toks[k].text.substr(0, colon);
        if (!is_label(a)) throw FormatError(ln, toks[k].column, "invalid action label '" + a + "'");
        d.chance.emplace_back(a, number_at(toks[k].text.substr(colon + 1), ln,
                                           toks[k].column + static_cast<int>(colon) + 1));
      }
      spec.nodes.push_back(std::move(d));
    } else if (kw == "leaf") {
      need(3);
      GameSpec::NodeDecl d;
      d.line = ln;
      d.kind = NodeKind::kTerminal;
      d.path = toks[1].text;
      const std::string body = keyed(toks[2], "payoffs", ln);
      int col = toks[2].column + 8;
      for (const auto& u : split(body, ',')) {
        d.payoffs.push_back(number_at(u, ln, col));
        col += static_cast<int>(u.size()) + 1;
      }
      spec.nodes.push_back(std::move(d));
    } else {
      throw FormatError(ln, toks[0].column, "unknown record '" + kw + "'");
    }
  });
  if (!have_header) throw FormatError(0, 0, "missing game record");
  return spec;
}

Game parse_game_unchecked(std::string_view text) {
  const GameSpec spec = parse_game_spec(text);
  try {
    return Game::build(spec);
  } catch (const GameError& e) {
    throw FormatError(0, 0, e.what());
  }
}

Game parse_game(std::string_view text) {
  Game g = parse_game_unchecked(text);
  const auto diags = validate_game(g);
  if (!diags.empty()) {
    std::string msg = diags.front();
    for (std::size_t k = 1; k < diags.size(); ++k) msg += "; " + diags[k];
    throw FormatError(0, 0, msg);
  }
  return g;
}

std::string serialize_game(const Game& game) {
  std::ostringstream os;
  os << "game " << game.name() << " players=" << game.num_players() << "\n";
  for (int I : game.infosets_in_decl_order()) {
    const auto& info = game.infoset(I);
    os << "infoset " << info.label << " player=" << info.player + 1 << " actions=";
    for (std::size_t k = 0; k < info.actions.size(); ++k) os << (k ? "," : "") << info.actions[k];
    os << "\n";
  }
  for (const auto& n : game.nodes()) {
    switch (n.kind) {
      case NodeKind::kDecision:
        os << "node " << n.path << " infoset=" << game.infoset(n.infoset).label << "\n";
        break;
      case NodeKind::kChance:
        os << "chance " << n.path;
        for (std::size_t k = 0; k < n.chance_actions.size(); ++k)
          os << " " << n.chance_actions[k] << ":" << format_number(n.chance_probs[k]);
        os << "\n";
        break;
      case NodeKind::kTerminal:
        os << "leaf " << n.path << " payoffs=";
        for (std::size_t k = 0; k < n.payoffs.size(); ++k)
          os << (k ? "," : "") << format_number(n.payoffs[k]);
        os << "\n";
        break;
    }
  }
  return os.str();
}

std::string format_profile(const Game& game, const PureProfile& pi) {
  std::string out;
  for (int p = 0; p < game.num_players(); ++p) {
    if (p) out += ';';
    if (game.num_player_infosets(p) == 0) {
      out += '-';
      continue;
    }
    for (int I = game.infoset_begin(p); I < game.infoset_end(p); ++I) {
      if (I > game.infoset_begin(p)) out += ',';
      out += game.infoset(I).actions[pi[I]];
    }
  }
  return out;
}

JointDistribution parse_distribution(std::string_view text, const Game& game) {
  JointDistribution mu;
  std::set<PureProfile> seen;
  for_each_line(text, [&](int ln, std::string_view line) {
    const auto toks = tokenize(line);
    if (toks.empty()) return;
    if (toks[0].text != "mu") throw FormatError(ln, toks[0].column, "expected 'mu' record");
    if (toks.size() != 3) throw FormatError(ln, 1, "mu record expects a profile and a probability");
    const auto groups = split(toks[1].text, ';');
    if (static_cast<int>(groups.size()) != game.num_players())
      throw FormatError(ln, toks[1].column,
                        "profile lists " + std::to_string(groups.size()) + " players, expected " +
                            std::to_string(game.num_players()));
    PureProfile pi(game.num_infosets(), 0);
    for (int p = 0; p < game.num_players(); ++p) {
      const int n = game.num_player_infosets(p);
      if (n == 0) {
        if (groups[p] != "-" && !groups[p].empty())
          throw FormatError(ln, toks[1].column, "player " + std::to_string(p + 1) + " has no infosets");
        continue;
      }
      const auto acts = split(groups[p], ',');
      if (static_cast<int>(acts.size()) != n)
        throw FormatError(ln, toks[1].column,
                          "player " + std::to_string(p + 1) + " needs " + std::to_string(n) +
                              " actions, got " + std::to_string(acts.size()));
      for (int k = 0; k < n; ++k) {
        const auto& info = game.infoset(game.infoset_begin(p) + k);
        int local = -1;
        for (std::size_t j = 0; j < info.actions.size(); ++j)
          if (info.actions[j] == acts[k]) local = static_cast<int>(j);
        if (local < 0)
          throw FormatError(ln, toks[1].column,
                            "action " + acts[k] + " not in infoset " + info.label);
        pi[game.infoset_begin(p) + k] = local;
      }
    }
    if (!seen.insert(pi).second) throw FormatError(ln, toks[1].column, "duplicate profile line");
    Number prob = number_at(toks[2].text, ln, toks[2].column);
    if (prob.value < 0) throw FormatError(ln, toks[2].column, "negative probability");
    mu.entries.emplace_back(std::move(pi), std::move(prob));
  });
  const Rational total = mu.total();
  const bool ok = mu.exact() ? total == 1 : std::abs(total.get_d() - 1.0) <= 1e-9;
  if (!ok)
    throw FormatError(0, 0, "total mass " +
                                (mu.exact() ? format_rational(total) : format_double(total.get_d())) +
                                " ≠ 1");
  mu.sort(game);
  return mu;
}

std::string serialize_distribution(const JointDistribution& mu, const Game& game) {
  std::string out;
  for (const auto& [pi, p] : mu.entries)
    out += "mu " + format_profile(game, pi) + " " + format_number(p) + "\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace efpce
