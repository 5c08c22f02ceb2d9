#pragma once

#include "rdeed/network.hpp"

namespace rdeed {

// Cell averages on a uniform grid of the unit interval; rows are cells,
// columns are species.
class Field {
 public:
  Field() = default;
  Field(int cells, int species) : values_(Mat::Zero(cells, species)) {}
  explicit Field(Mat values) : values_(std::move(values)) {}
  static Field constant(int cells, const Vec& c);

  int cells() const { return static_cast<int>(values_.rows()); }
  int species() const { return static_cast<int>(values_.cols()); }
  double h() const { return 1.0 / cells(); }
  double x(int j) const { return (j + 0.5) * h(); }

  Mat& values() { return values_; }
  const Mat& values() const { return values_; }
  double& operator()(int j, int i) { return values_(j, i); }
  double operator()(int j, int i) const { return values_(j, i); }

  Vec averages() const;
  double min_value() const;

 private:
  Mat values_;
};

}  // namespace rdeed
