#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdeed/network.hpp"

namespace rdeed {

// Rows of Q span ker(W); Q * R(c) = 0 for every state c.
struct ConservationBasis {
  Mat Q;  // m x I
  int m = 0;
  bool nonnegative = false;
  bool exact = false;  // computed with rational arithmetic
  std::vector<std::string> row_labels;
};

ConservationBasis conservation_basis(const ReactionNetwork& net);

// M = Q c0.
Vec mass_vector(const ConservationBasis& basis, const Vec& c0);

struct ConservationCheck {
  int samples = 0;
  double max_residual = 0.0;
  bool passed = false;  // max_residual < 1e-10
};

// Max |Q R(c)| over random c in [0,10]^I.
ConservationCheck check_conserved(const ConservationBasis& basis, const ReactionNetwork& net, int samples,
                                  std::uint64_t seed);

// Upper bound on each species' average implied by nonnegative laws and masses;
// +inf where no law covers the species.
Vec species_bounds(const ConservationBasis& basis, const Vec& M);

}  // namespace rdeed
