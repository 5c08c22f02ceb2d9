#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdeed/conservation.hpp"
#include "rdeed/network.hpp"

namespace rdeed {

struct DetailedBalanceCheck {
  bool balanced = false;
  Vec log_witness;  // least-squares (minimum-norm) solution of W x = log(kf/kb)
  double residual = 0.0;  // max-norm of W x - log(kf/kb)
};

DetailedBalanceCheck check_detailed_balance(const ReactionNetwork& net);

// Substitution c = scale .* c_hat turns kf c^alpha - kb c^beta into
// k (c_hat^alpha - c_hat^beta) with k = kf * scale^alpha.
struct RescaledNetwork {
  ReactionNetwork network;
  Vec scale;  // exp(witness)
};

RescaledNetwork rescale_to_unit_rates(const ReactionNetwork& net);

struct Equilibrium {
  Vec c_inf;
  double residual_reactions = 0.0;  // max_r |kf c^alpha - kb c^beta| / k_r in unit-rate form
  double residual_mass = 0.0;       // max |Q c - M|
  int iterations = 0;
};

// Bisection for the single-reaction family. M is ordered like the rows of
// conservation_basis: M_{1,1..J} then M_{2..I,1}.
Equilibrium solve_equilibrium_single(const ReactionNetwork& net, const Vec& M);

// Damped Newton in log variables.
Equilibrium solve_equilibrium_general(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M,
                                      const std::optional<Vec>& x0 = std::nullopt);

// Single-reaction solver when the network has that shape, general otherwise.
Equilibrium solve_equilibrium(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M);

// Residual of a candidate detailed-balance state.
double reaction_residual(const ReactionNetwork& net, const Vec& c);

struct BoundaryEquilibrium {
  std::vector<int> zero_pattern;
  Vec state;
  double residual = 0.0;
};

struct BoundaryEquilibriumReport {
  std::vector<BoundaryEquilibrium> found;
  int patterns_searched = 0;
  bool heuristic = true;  // non-detection is not a proof of absence
};

BoundaryEquilibriumReport boundary_equilibria(const ReactionNetwork& net, const ConservationBasis& basis,
                                              const Vec& M, std::uint64_t seed = 42);

}  // namespace rdeed
