#include "tbsg/dataset.hpp"

#include <cmath>

namespace tbsg {

Dataset::Dataset(std::size_t dim, std::vector<float> values) : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw UsageError("dataset dimension must be positive");
  if (values_.size() % dim_ != 0) {
    throw UsageError("dataset value count " + std::to_string(values_.size()) +
                     " is not a multiple of dim " + std::to_string(dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw UsageError("non-finite value in vector " + std::to_string(i / dim_));
    }
  }
}

std::span<const float> Dataset::at(PointId i) const {
  if (i >= size()) {
    throw UsageError("point id " + std::to_string(i) + " out of range for dataset of size " +
                     std::to_string(size()));
  }
  return row(i);
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw UsageError("invalid dataset slice");
  return Dataset(dim_, std::vector<float>(values_.begin() + static_cast<std::ptrdiff_t>(begin * dim_),
                                          values_.begin() + static_cast<std::ptrdiff_t>(end * dim_)));
}

double squared_l2_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw UsageError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  return squared_l2_unchecked(a.data(), b.data(), a.size());
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
  return std::sqrt(squared_l2_distance(a, b));
}

double Neighbor::distance() const { return std::sqrt(sq_dist); }

}  // namespace tbsg
