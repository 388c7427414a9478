#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbsg {

/// Row index into one Dataset. Only meaningful relative to that dataset.
using PointId = std::uint32_t;

/// Bad arguments from the caller (wrong dims, out-of-range ids, k > l, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed on-disk content. Carries the byte offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Filesystem failure (cannot open, short write).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Selects between the OpenMP kernels and their serial reference twins.
enum class Execution { serial, parallel };

/// Dense row-major n x d matrix of finite 32-bit floats. Immutable once built.
class Dataset {
 public:
  Dataset() = default;

  /// Takes ownership of `values`; throws UsageError unless values.size() == count * dim
  /// and every value is finite. A count of zero is allowed with any positive dim.
  Dataset(std::size_t dim, std::vector<float> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const float> row(PointId i) const noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }
  std::span<const float> operator[](PointId i) const noexcept { return row(i); }

  /// Bounds-checked row access.
  std::span<const float> at(PointId i) const;

  std::span<const float> values() const noexcept { return values_; }

  /// Copy of rows [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

// Distance kernels accumulate in double. Callers compare squared values and
// take the square root only when a true distance is reported.

double squared_l2_distance(std::span<const float> a, std::span<const float> b);
double l2_distance(std::span<const float> a, std::span<const float> b);

/// Unchecked variant for hot loops where both spans are known to share dim.
inline double squared_l2_unchecked(const float* a, const float* b, std::size_t dim) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return acc;
}

inline double squared_l2(const Dataset& ds, PointId a, PointId b) noexcept {
  return squared_l2_unchecked(ds.row(a).data(), ds.row(b).data(), ds.dim());
}

/// (id, squared distance) pair. Ordering is by distance, then by id.
struct Neighbor {
  PointId id = 0;
  double sq_dist = 0.0;

  double distance() const;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

inline bool closer(const Neighbor& a, const Neighbor& b) noexcept {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.id < b.id);
}

}  // namespace tbsg
