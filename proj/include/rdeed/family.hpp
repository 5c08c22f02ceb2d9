#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rdeed/network.hpp"

namespace rdeed {

// alpha_1 A_1 + ... + alpha_I A_I <-> beta_1 B_1 + ... + beta_J B_J with every
// species on exactly one side.
struct SingleReactionFamily {
  std::vector<int> a;  // network indices of A_1..A_I
  std::vector<int> b;  // network indices of B_1..B_J
  Vec alpha;
  Vec beta;
};

std::optional<SingleReactionFamily> as_single_reaction(const ReactionNetwork& net);

// C1 + C2 <-> C3 <-> C4 + C5 (either orientation of each reaction).
struct EnzymeChainFamily {
  std::array<int, 5> c;  // network index of C1..C5
};

std::optional<EnzymeChainFamily> as_enzyme_chain(const ReactionNetwork& net);

}  // namespace rdeed
