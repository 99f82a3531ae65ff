#pragma once

// Line-oriented text formats.
//
//   game <name> players=<n>
//   infoset <label> player=<i> actions=<a1,a2,...>
//   node <path> infoset=<label>
//   chance <path> <a1>:<p1> <a2>:<p2> ...
//   leaf <path> payoffs=<u1,...,un>
//
// Paths are '/'-joined action labels and the root is '/'. Players are
// 1-based in the file. '#' starts a comment.
//
// Distributions list one profile per line:
//
//   mu <p1 actions>;<p2 actions>;... <prob>
//
// with each player's actions comma-separated in the document order of that
// player's infoset lines ('-' for a player without infosets).

#include <stdexcept>
#include <string>
#include <string_view>

#include "efpce/game.hpp"

namespace efpce {

class FormatError : public std::runtime_error {
 public:
  FormatError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Lexical and record-level parsing only.
GameSpec parse_game_spec(std::string_view text);
/// Parses, assembles and validates. Structural and semantic problems are
/// reported as FormatError.
Game parse_game(std::string_view text);
/// Parses and assembles without running validate_game.
Game parse_game_unchecked(std::string_view text);
std::string serialize_game(const Game& game);

JointDistribution parse_distribution(std::string_view text, const Game& game);
std::string serialize_distribution(const JointDistribution& mu, const Game& game);
/// "a,c,e,h;m,p" for a profile.
std::string format_profile(const Game& game, const PureProfile& pi);

std::string read_file(const std::string& path);

}  // namespace efpce
