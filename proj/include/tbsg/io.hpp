#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg {

/// Exact top-k ids per query, ascending by true distance (ties by id).
struct GroundTruth {
  std::size_t k = 0;
  std::vector<std::vector<PointId>> ids;

  std::size_t query_count() const noexcept { return ids.size(); }
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// TEXMEX .fvecs / .ivecs. Every record is a little-endian int32 dimension
// followed by that many little-endian float32 (fvecs) or int32 (ivecs) values.
// All records in a file share one dimension. Parsing is all-or-nothing: any
// defect raises FormatError naming the offending byte offset.

Dataset read_fvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, const Dataset& dataset);

std::vector<std::vector<std::int32_t>> read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path, const std::vector<std::vector<std::int32_t>>& rows);

/// In-memory parsers behind read_fvecs / read_ivecs.
Dataset parse_fvecs(std::span<const std::byte> bytes);
std::vector<std::vector<std::int32_t>> parse_ivecs(std::span<const std::byte> bytes);

/// GroundTruth <-> ivecs. Reading validates uniform k and unique, in-range ids
/// when `base_count` is nonzero.
GroundTruth read_groundtruth(const std::filesystem::path& path, std::size_t base_count = 0);
void write_groundtruth(const std::filesystem::path& path, const GroundTruth& gt);

struct SyntheticData {
  Dataset points;
  Dataset centers;
  std::vector<std::uint32_t> labels;  // generating cluster of each point
};

/// Gaussian blobs: `clusters` centers drawn from N(0, 1)^d, each point picks a
/// cluster uniformly and adds N(0, spread^2) noise per coordinate. Uses Rng
/// (mt19937_64 + Box-Muller), so a seed reproduces the same bits everywhere.
SyntheticData generate_synthetic_labeled(std::size_t n, std::size_t dim, std::size_t clusters,
                                         double spread, std::uint64_t seed);

Dataset generate_synthetic(std::size_t n, std::size_t dim, std::size_t clusters, double spread,
                           std::uint64_t seed);

}  // namespace tbsg
