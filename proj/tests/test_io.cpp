#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "tbsg/io.hpp"
#include "tbsg/random.hpp"

using namespace tbsg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tbsg_io_" + std::to_string(Rng(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::vector<std::byte> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

void put_i32(std::vector<std::byte>& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::byte>((u >> s) & 0xffu));
}

void put_f32(std::vector<std::byte>& out, float v) { put_i32(out, std::bit_cast<std::int32_t>(v)); }

Dataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n * dim);
  // Raw bit patterns cover subnormals, signed zeros and extreme exponents.
  for (auto& x : v) {
    float f;
    do {
      f = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next()));
    } while (!std::isfinite(f));
    x = f;
  }
  return Dataset(dim, std::move(v));
}

bool bitwise_equal(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  return std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("fvecs round-trips bitwise") {
  TempDir dir;
  for (std::size_t n : {0u, 1u, 100u}) {
    const Dataset ds = n == 0 ? Dataset{} : random_dataset(n, 7, n);
    write_fvecs(dir / "x.fvecs", ds);
    CHECK(fs::file_size(dir / "x.fvecs") == n * (4 + 4 * 7));
    const Dataset back = read_fvecs(dir / "x.fvecs");
    CHECK(back.size() == n);
    CHECK(bitwise_equal(ds, back));
  }
}

TEST_CASE("fvecs writes the little-endian record layout") {
  TempDir dir;
  write_fvecs(dir / "one.fvecs", Dataset(2, {1.0f, -2.5f}));
  std::vector<std::byte> want;
  put_i32(want, 2);
  put_f32(want, 1.0f);
  put_f32(want, -2.5f);
  CHECK(file_bytes(dir / "one.fvecs") == want);
}

TEST_CASE("ivecs round-trips") {
  TempDir dir;
  write_ivecs(dir / "a.ivecs", {{1, 2, 3}});
  CHECK(read_ivecs(dir / "a.ivecs") == std::vector<std::vector<std::int32_t>>{{1, 2, 3}});

  write_ivecs(dir / "empty.ivecs", {});
  CHECK(read_ivecs(dir / "empty.ivecs").empty());

  Rng rng(3);
  std::vector<std::vector<std::int32_t>> rows(50, std::vector<std::int32_t>(9));
  for (auto& r : rows) {
    for (auto& v : r) v = static_cast<std::int32_t>(rng.next());
  }
  write_ivecs(dir / "r.ivecs", rows);
  CHECK(read_ivecs(dir / "r.ivecs") == rows);

  CHECK_THROWS_AS(write_ivecs(dir / "bad.ivecs", {{1, 2}, {3}}), UsageError);
}

TEST_CASE("empty fvecs file is an empty dataset") {
  TempDir dir;
  std::ofstream(dir / "e.fvecs").close();
  const Dataset ds = read_fvecs(dir / "e.fvecs");
  CHECK(ds.size() == 0);
}

TEST_CASE("malformed fvecs reports the byte offset") {
  std::vector<std::byte> good;
  put_i32(good, 2);
  put_f32(good, 1.0f);
  put_f32(good, 2.0f);

  SUBCASE("truncated header") {
    auto bytes = good;
    bytes.push_back(std::byte{1});
    try {
      (void)parse_fvecs(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 12);
    }
  }
  SUBCASE("truncated payload") {
    auto bytes = good;
    put_i32(bytes, 2);
    put_f32(bytes, 3.0f);
    try {
      (void)parse_fvecs(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 12);
    }
  }
  SUBCASE("inconsistent dimension") {
    auto bytes = good;
    put_i32(bytes, 3);
    for (int i = 0; i < 3; ++i) put_f32(bytes, 0.0f);
    try {
      (void)parse_fvecs(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 12);
    }
  }
  SUBCASE("non-positive dimension") {
    for (std::int32_t d : {0, -4}) {
      std::vector<std::byte> bytes;
      put_i32(bytes, d);
      try {
        (void)parse_fvecs(bytes);
        FAIL("expected FormatError");
      } catch (const FormatError& e) {
        CHECK(e.offset() == 0);
      }
    }
  }
  SUBCASE("non-finite value") {
    auto bytes = good;
    put_i32(bytes, 2);
    put_f32(bytes, 0.0f);
    put_f32(bytes, std::numeric_limits<float>::quiet_NaN());
    try {
      (void)parse_fvecs(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 20);
    }
  }
}

TEST_CASE("a bad tail rejects the whole file") {
  TempDir dir;
  write_fvecs(dir / "x.fvecs", random_dataset(10, 4, 1));
  {
    std::ofstream out(dir / "x.fvecs", std::ios::binary | std::ios::app);
    out.write("\x04\x00", 2);
  }
  CHECK_THROWS_AS(read_fvecs(dir / "x.fvecs"), FormatError);

  std::vector<std::byte> bytes;
  put_i32(bytes, 1);
  put_i32(bytes, 5);
  put_i32(bytes, 2);
  CHECK_THROWS_AS(parse_ivecs(bytes), FormatError);
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS(read_fvecs("/nonexistent/dir/x.fvecs"), IoError);
  CHECK_THROWS_AS(write_fvecs("/nonexistent/dir/x.fvecs", Dataset(1, {1.0f})), IoError);
}

TEST_CASE("groundtruth files validate ids") {
  TempDir dir;
  const GroundTruth gt{3, {{0, 4, 2}, {1, 2, 3}}};
  write_groundtruth(dir / "gt.ivecs", gt);
  CHECK(read_groundtruth(dir / "gt.ivecs", 5) == gt);
  CHECK_THROWS_AS(read_groundtruth(dir / "gt.ivecs", 4), UsageError);

  write_ivecs(dir / "dup.ivecs", {{1, 1, 2}});
  CHECK_THROWS_AS(read_groundtruth(dir / "dup.ivecs"), UsageError);
}

TEST_CASE("synthetic data is deterministic") {
  CHECK(generate_synthetic(1, 2, 1, 0.1, 7) == generate_synthetic(1, 2, 1, 0.1, 7));
  CHECK(generate_synthetic(500, 4, 3, 0.1, 7) == generate_synthetic(500, 4, 3, 0.1, 7));
  CHECK_FALSE(generate_synthetic(500, 4, 3, 0.1, 7) == generate_synthetic(500, 4, 3, 0.1, 8));
}

TEST_CASE("synthetic data has the requested shape") {
  const Dataset ds = generate_synthetic(1000, 16, 4, 0.5, 1);
  CHECK(ds.size() == 1000);
  CHECK(ds.dim() == 16);
  CHECK_THROWS_AS(generate_synthetic(0, 2, 1, 0.1, 1), UsageError);
  CHECK_THROWS_AS(generate_synthetic(10, 0, 1, 0.1, 1), UsageError);
  CHECK_THROWS_AS(generate_synthetic(10, 2, 0, 0.1, 1), UsageError);
  CHECK_THROWS_AS(generate_synthetic(10, 2, 1, -1.0, 1), UsageError);
}

TEST_CASE("cluster labels are recoverable at small spread") {
  const auto data = generate_synthetic_labeled(2000, 16, 4, 0.01, 9);
  std::size_t matched = 0;
  for (PointId i = 0; i < data.points.size(); ++i) {
    PointId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (PointId c = 0; c < data.centers.size(); ++c) {
      const double d = squared_l2_distance(data.points.row(i), data.centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    matched += best == data.labels[i];
  }
  CHECK(static_cast<double>(matched) / 2000.0 >= 0.99);
}
