#pragma once

#include <string>

#include "rdeed/network.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(RDEED_SOURCE_DIR) + "/networks/" + name; }

inline rdeed::ReactionNetwork load(const std::string& name) { return rdeed::load_network(fixture(name)); }

inline rdeed::Vec vec(std::initializer_list<double> xs) {
  rdeed::Vec v(static_cast<Eigen::Index>(xs.size()));
  int k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

}  // namespace testing
