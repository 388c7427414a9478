#include <cstring>
#include <fstream>

#include "tbsg/index.hpp"

namespace tbsg {
namespace {

constexpr char kMagic[4] = {'T', 'B', 'S', 'G'};

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::byte>((v >> shift) & 0xffu));
}

class Reader {
 public:
  Reader(std::span<const std::byte> bytes, std::size_t start) : bytes_(bytes), offset_(start) {}

  std::uint32_t u32(const char* what) {
    if (bytes_.size() - offset_ < 4) throw FormatError(std::string("truncated index: missing ") + what, offset_);
    const std::byte* p = bytes_.data() + offset_;
    offset_ += 4;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

  std::size_t offset() const noexcept { return offset_; }
  std::size_t remaining() const noexcept { return bytes_.size() - offset_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t offset_;
};

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw UsageError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::byte> serialize_index(const TbsgIndex& index) {
  if (index.adjacency.size() != index.n) throw UsageError("index adjacency size does not match n");
  if (index.max_out_degree() > index.m) throw UsageError("index has an adjacency list longer than m");
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, kIndexFormatVersion);
  put_u32(out, narrow(index.n, "n"));
  put_u32(out, narrow(index.m, "m"));
  put_u32(out, index.enter_point);
  for (const auto& list : index.adjacency) {
    put_u32(out, narrow(list.size(), "degree"));
    for (PointId id : list) put_u32(out, id);
  }
  return out;
}

TbsgIndex deserialize_index(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad index magic", 0);
  Reader in(bytes, 4);
  const std::size_t version_at = in.offset();
  const std::uint32_t version = in.u32("version");
  if (version != kIndexFormatVersion) {
    throw FormatError("unsupported index format version " + std::to_string(version), version_at);
  }
  TbsgIndex index;
  index.n = in.u32("n");
  index.m = in.u32("m");
  const std::size_t ep_at = in.offset();
  index.enter_point = in.u32("enter point");
  if (index.n > 0 && index.enter_point >= index.n) throw FormatError("enter point out of range", ep_at);
  if (index.n > in.remaining() / 4) throw FormatError("truncated index: node count exceeds file size", in.offset());
  index.adjacency.resize(index.n);
  for (auto& list : index.adjacency) {
    const std::size_t degree_at = in.offset();
    const std::uint32_t degree = in.u32("degree");
    if (degree > index.m) throw FormatError("adjacency list longer than m", degree_at);
    if (degree > in.remaining() / 4) throw FormatError("truncated index: adjacency list", degree_at);
    list.reserve(degree);
    for (std::uint32_t j = 0; j < degree; ++j) {
      const std::size_t id_at = in.offset();
      const PointId id = in.u32("neighbor id");
      if (id >= index.n) throw FormatError("neighbor id out of range", id_at);
      list.push_back(id);
    }
  }
  if (in.remaining() != 0) throw FormatError("trailing bytes after index", in.offset());
  return index;
}

void save_index(const TbsgIndex& index, const std::filesystem::path& path) {
  const auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

TbsgIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return deserialize_index(bytes);
}

}  // namespace tbsg
