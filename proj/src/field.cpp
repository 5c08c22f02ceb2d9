#include "rdeed/field.hpp"

namespace rdeed {

Field Field::constant(int cells, const Vec& c) {
  if (cells < 1) throw Error("field needs at least one cell");
  Mat v(cells, c.size());
  for (int j = 0; j < cells; ++j) v.row(j) = c.transpose();
  return Field(std::move(v));
}

Vec Field::averages() const { return values_.colwise().mean().transpose(); }

double Field::min_value() const { return values_.size() ? values_.minCoeff() : 0.0; }

}  // namespace rdeed
