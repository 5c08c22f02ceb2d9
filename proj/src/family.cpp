#include "rdeed/family.hpp"

#include <algorithm>

namespace rdeed {

std::optional<SingleReactionFamily> as_single_reaction(const ReactionNetwork& net) {
  if (net.num_reactions() != 1) return std::nullopt;
  const Reaction& rx = net.reaction(0);
  SingleReactionFamily f;
  std::vector<double> al, be;
  for (int i = 0; i < net.num_species(); ++i) {
    bool in_a = rx.alpha[i] > 0.0, in_b = rx.beta[i] > 0.0;
    if (in_a == in_b) return std::nullopt;  // on both sides, or absent
    if (in_a) {
      f.a.push_back(i);
      al.push_back(rx.alpha[i]);
    } else {
      f.b.push_back(i);
      be.push_back(rx.beta[i]);
    }
  }
  if (f.a.empty() || f.b.empty()) return std::nullopt;
  f.alpha = Eigen::Map<Vec>(al.data(), static_cast<Eigen::Index>(al.size()));
  f.beta = Eigen::Map<Vec>(be.data(), static_cast<Eigen::Index>(be.size()));
  return f;
}

namespace {

std::vector<int> support(const Vec& s) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] != 0.0) out.push_back(static_cast<int>(i));
  return out;
}

bool unit_on(const Vec& s, const std::vector<int>& sup) {
  return std::all_of(sup.begin(), sup.end(), [&](int i) { return s[i] == 1.0; });
}

// Splits a reaction into (singleton species, pair) if it has the shape X <-> Y + Z.
std::optional<std::pair<int, std::array<int, 2>>> singleton_pair(const Reaction& rx) {
  auto sa = support(rx.alpha), sb = support(rx.beta);
  if (!unit_on(rx.alpha, sa) || !unit_on(rx.beta, sb)) return std::nullopt;
  if (sa.size() == 1 && sb.size() == 2) return std::make_pair(sa[0], std::array<int, 2>{sb[0], sb[1]});
  if (sa.size() == 2 && sb.size() == 1) return std::make_pair(sb[0], std::array<int, 2>{sa[0], sa[1]});
  return std::nullopt;
}

}  // namespace

std::optional<EnzymeChainFamily> as_enzyme_chain(const ReactionNetwork& net) {
  if (net.num_reactions() != 2 || net.num_species() != 5) return std::nullopt;
  auto r1 = singleton_pair(net.reaction(0));
  auto r2 = singleton_pair(net.reaction(1));
  if (!r1 || !r2 || r1->first != r2->first) return std::nullopt;
  EnzymeChainFamily f{{r1->second[0], r1->second[1], r1->first, r2->second[0], r2->second[1]}};
  std::array<int, 5> sorted = f.c;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 5; ++i)
    if (sorted[i] != i) return std::nullopt;
  return f;
}

}  // namespace rdeed
