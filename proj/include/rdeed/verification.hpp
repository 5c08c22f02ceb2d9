#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace rdeed {

// Outcome of a sampled inequality check LHS >= RHS.
struct VerificationReport {
  std::string name;
  long samples = 0;
  long violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();           // min (LHS - RHS)
  double min_relative_slack = std::numeric_limits<double>::infinity();  // min (LHS - RHS) / max(|LHS|, |RHS|)
  double median_relative_slack = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> parameters;
  std::uint64_t seed = 0;
  bool passed() const { return violations == 0; }
};

// Collects LHS/RHS pairs; a sample violates when LHS - RHS < -1e-12 max(1, |LHS|, |RHS|).
class SlackAccumulator {
 public:
  void add(double lhs, double rhs);
  void finish(VerificationReport& rep);

 private:
  long n_ = 0;
  long violations_ = 0;
  double min_slack_ = std::numeric_limits<double>::infinity();
  double min_rel_ = std::numeric_limits<double>::infinity();
  std::vector<double> rel_;
};

// Splitmix64 of (seed, index): independent per-sample seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace rdeed
