#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "rdeed/error.hpp"

namespace rdeed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One reversible reaction  alpha -> beta  (forward kf, backward kb).
struct Reaction {
  Vec alpha;
  Vec beta;
  double kf = 1.0;
  double kb = 1.0;
};

class ReactionNetwork {
 public:
  // Validates: stoichiometric entries in {0} u [1, inf), kf, kb, d > 0, alpha != beta.
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions, Vec diffusion);

  int num_species() const { return static_cast<int>(species_.size()); }
  int num_reactions() const { return static_cast<int>(reactions_.size()); }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(int r) const { return reactions_[r]; }
  const Vec& diffusion() const { return diffusion_; }

  // -1 when absent.
  int species_index(std::string_view name) const;
  bool integral_stoichiometry() const;
  // kf == kb for every reaction.
  bool unit_rates() const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  Vec diffusion_;
};

// DSL: one reaction per line  "<terms> <-> <terms> ; kf=<float> kb=<float>",
// term "[coeff] Name"; "diffusion: Name=<float> ..." lines; '#' comments.
// Species are numbered in order of first appearance. Missing diffusion
// coefficients default to 1.
ReactionNetwork parse_network(std::string_view text);
ReactionNetwork load_network(const std::string& path);

// Row r is (beta^r - alpha^r)^T.
Mat wegscheider_matrix(const ReactionNetwork& net);

// c^e with 0^0 = 1.
double monomial(const Vec& c, const Vec& e);

// K_r(c) = kf c^alpha - kb c^beta.
Vec rate_vector(const ReactionNetwork& net, const Vec& c);

// R(c) = sum_r (alpha^r - beta^r) K_r(c); throws on negative entries.
Vec reaction_vector(const ReactionNetwork& net, const Vec& c);

// dR/dc, I x I.
Mat reaction_jacobian(const ReactionNetwork& net, const Vec& c);

// "A + 2 B <-> C" style rendering.
std::string format_reaction(const ReactionNetwork& net, int r);

}  // namespace rdeed
