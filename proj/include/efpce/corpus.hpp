#pragma once

// Seeded random games with perfect recall, for property tests and batch runs.

#include <cstdint>
#include <vector>

#include "efpce/game.hpp"

namespace efpce {

struct CorpusOptions {
  int players = 2;
  int max_depth = 3;        // edges from the root to any leaf
  int max_actions = 2;      // per infoset
  double chance_probability = 0.15;
  double leaf_probability = 0.2;   // early leaf below the root
  double merge_probability = 0.6;  // join an existing compatible infoset
  int payoff_max = 4;              // payoffs uniform in {0, ..., payoff_max}
};

/// Deterministic in (seed, options). Always passes validate_game.
GameSpec random_game_spec(std::uint64_t seed, const CorpusOptions& options = {});
Game random_game(std::uint64_t seed, const CorpusOptions& options = {});
/// Games for seeds base, base+1, ....
std::vector<Game> random_corpus(std::uint64_t base_seed, int count,
                                const CorpusOptions& options = {});

}  // namespace efpce
