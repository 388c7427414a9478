#include "tbsg/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

namespace tbsg {
namespace {

std::vector<std::byte> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw IoError("short read on " + path.string());
  }
  return bytes;
}

void dump(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

std::uint32_t load_u32le(const std::byte* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::byte>((v >> shift) & 0xffu));
}

/// Walks the shared record framing and hands each payload word to `sink`.
/// Returns the record dimension (0 for an empty input).
template <typename Sink>
std::size_t walk_records(std::span<const std::byte> bytes, Sink&& sink) {
  std::size_t dim = 0;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    if (bytes.size() - offset < 4) throw FormatError("truncated record header", offset);
    const auto d = static_cast<std::int32_t>(load_u32le(bytes.data() + offset));
    if (d <= 0) throw FormatError("non-positive record dimension " + std::to_string(d), offset);
    if (dim == 0) {
      dim = static_cast<std::size_t>(d);
    } else if (static_cast<std::size_t>(d) != dim) {
      throw FormatError("inconsistent record dimension " + std::to_string(d) + " (expected " +
                            std::to_string(dim) + ")",
                        offset);
    }
    const std::size_t payload = 4 * dim;
    if (bytes.size() - offset - 4 < payload) throw FormatError("truncated record payload", offset);
    offset += 4;
    for (std::size_t j = 0; j < dim; ++j, offset += 4) sink(load_u32le(bytes.data() + offset), offset);
  }
  return dim;
}

}  // namespace

Dataset parse_fvecs(std::span<const std::byte> bytes) {
  std::vector<float> values;
  values.reserve(bytes.size() / 4);
  const std::size_t dim = walk_records(bytes, [&](std::uint32_t word, std::size_t offset) {
    const float v = std::bit_cast<float>(word);
    if (!std::isfinite(v)) throw FormatError("non-finite float", offset);
    values.push_back(v);
  });
  if (dim == 0) return {};
  return Dataset(dim, std::move(values));
}

std::vector<std::vector<std::int32_t>> parse_ivecs(std::span<const std::byte> bytes) {
  std::vector<std::int32_t> flat;
  flat.reserve(bytes.size() / 4);
  const std::size_t dim = walk_records(
      bytes, [&](std::uint32_t word, std::size_t) { flat.push_back(static_cast<std::int32_t>(word)); });
  std::vector<std::vector<std::int32_t>> rows;
  if (dim == 0) return rows;
  rows.reserve(flat.size() / dim);
  for (std::size_t i = 0; i < flat.size(); i += dim) rows.emplace_back(flat.begin() + i, flat.begin() + i + dim);
  return rows;
}

Dataset read_fvecs(const std::filesystem::path& path) { return parse_fvecs(slurp(path)); }

std::vector<std::vector<std::int32_t>> read_ivecs(const std::filesystem::path& path) {
  return parse_ivecs(slurp(path));
}

void write_fvecs(const std::filesystem::path& path, const Dataset& dataset) {
  std::vector<std::byte> out;
  out.reserve(dataset.size() * (4 + 4 * dataset.dim()));
  for (PointId i = 0; i < dataset.size(); ++i) {
    store_u32le(out, static_cast<std::uint32_t>(dataset.dim()));
    for (float v : dataset.row(i)) store_u32le(out, std::bit_cast<std::uint32_t>(v));
  }
  dump(path, out);
}

void write_ivecs(const std::filesystem::path& path, const std::vector<std::vector<std::int32_t>>& rows) {
  std::vector<std::byte> out;
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    if (row.empty() || row.size() != dim) throw UsageError("ivecs rows must be non-empty and of equal length");
    store_u32le(out, static_cast<std::uint32_t>(dim));
    for (std::int32_t v : row) store_u32le(out, static_cast<std::uint32_t>(v));
  }
  dump(path, out);
}

GroundTruth read_groundtruth(const std::filesystem::path& path, std::size_t base_count) {
  const auto rows = read_ivecs(path);
  GroundTruth gt;
  gt.k = rows.empty() ? 0 : rows.front().size();
  gt.ids.reserve(rows.size());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    std::vector<PointId> ids;
    ids.reserve(gt.k);
    std::unordered_set<std::int32_t> seen;
    for (std::int32_t v : rows[q]) {
      if (v < 0 || (base_count != 0 && static_cast<std::size_t>(v) >= base_count)) {
        throw UsageError("groundtruth row " + std::to_string(q) + " has out-of-range id " + std::to_string(v));
      }
      if (!seen.insert(v).second) {
        throw UsageError("groundtruth row " + std::to_string(q) + " repeats id " + std::to_string(v));
      }
      ids.push_back(static_cast<PointId>(v));
    }
    gt.ids.push_back(std::move(ids));
  }
  return gt;
}

void write_groundtruth(const std::filesystem::path& path, const GroundTruth& gt) {
  std::vector<std::vector<std::int32_t>> rows;
  rows.reserve(gt.ids.size());
  for (const auto& ids : gt.ids) rows.emplace_back(ids.begin(), ids.end());
  write_ivecs(path, rows);
}

}  // namespace tbsg
