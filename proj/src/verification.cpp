#include "rdeed/verification.hpp"

#include <algorithm>
#include <cmath>

namespace rdeed {

void SlackAccumulator::add(double lhs, double rhs) {
  ++n_;
  double slack = lhs - rhs;
  double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (!(slack >= -1e-12 * scale)) ++violations_;  // NaN counts as a violation
  min_slack_ = std::min(min_slack_, slack);
  double mag = std::max(std::abs(lhs), std::abs(rhs));
  double rel = mag > 0.0 ? slack / mag : 0.0;
  min_rel_ = std::min(min_rel_, rel);
  rel_.push_back(rel);
}

void SlackAccumulator::finish(VerificationReport& rep) {
  rep.samples = n_;
  rep.violations = violations_;
  rep.min_slack = min_slack_;
  rep.min_relative_slack = min_rel_;
  if (!rel_.empty()) {
    auto mid = rel_.begin() + static_cast<long>(rel_.size() / 2);
    std::nth_element(rel_.begin(), mid, rel_.end());
    rep.median_relative_slack = *mid;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace rdeed
