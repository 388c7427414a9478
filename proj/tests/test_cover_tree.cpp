#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "tbsg/cover_tree.hpp"
#include "tbsg/io.hpp"
#include "tbsg/random.hpp"

using namespace tbsg;

namespace {

// Walks the tree from the root and checks every structural invariant.
void check_invariants(const CoverTree& tree, const Dataset& ds) {
  const std::size_t n = ds.size();
  REQUIRE(tree.size() == n);
  CHECK_FALSE(tree.parent(tree.root()).has_value());

  std::size_t roots = 0, edges = 0;
  for (PointId p = 0; p < n; ++p) {
    REQUIRE(tree.contains(p));
    if (!tree.parent(p)) ++roots;
    for (PointId c : tree.children(p)) {
      ++edges;
      CHECK(tree.parent(c) == p);
      CHECK(tree.level(c) < tree.level(p));
      CHECK(l2_distance(ds.row(p), ds.row(c)) <= tree.covering_radius(p) * (1.0 + 1e-12));
    }
  }
  CHECK(roots == 1);
  CHECK(edges == n - 1);

  std::vector<char> seen(n, 0);
  std::vector<PointId> stack{tree.root()};
  seen[tree.root()] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const PointId u = stack.back();
    stack.pop_back();
    for (PointId c : tree.children(u)) {
      REQUIRE_FALSE(seen[c]);  // a second visit would mean a cycle or shared child
      seen[c] = 1;
      ++visited;
      stack.push_back(c);
    }
  }
  CHECK(visited == n);
}

}  // namespace

TEST_CASE("single point tree") {
  const Dataset ds(3, {1, 2, 3});
  const CoverTree tree = build_cover_tree(ds);
  CHECK(tree.root() == 0);
  CHECK(tree.children(0).empty());
  CHECK_FALSE(tree.parent(0).has_value());
  check_invariants(tree, ds);
}

TEST_CASE("two point tree") {
  const Dataset ds(2, {0, 0, 3, 4});
  const CoverTree tree = build_cover_tree(ds);
  REQUIRE(tree.children(0).size() == 1);
  CHECK(tree.children(0)[0] == 1);
  CHECK(tree.children(1).empty());
  CHECK(tree.covering_radius(0) >= 5.0);
  check_invariants(tree, ds);
}

TEST_CASE("insertion errors") {
  const Dataset ds(1, {0, 1, 2});
  CoverTree tree(ds, 0);
  tree.insert(1);
  CHECK_THROWS_AS(tree.insert(1), UsageError);
  CHECK_THROWS_AS(tree.insert(0), UsageError);
  CHECK_THROWS_AS(tree.insert(3), UsageError);
  CHECK_THROWS_AS(tree.children(2), UsageError);
  CHECK_THROWS_AS(tree.level(7), UsageError);
  CHECK_THROWS_AS(CoverTree(ds, 0, 1.0), UsageError);
  CHECK_THROWS_AS(CoverTree(Dataset{}, 0), UsageError);
  CHECK_THROWS_AS(CoverTree(ds, 5), UsageError);
}

TEST_CASE("duplicate points attach at distance zero") {
  const Dataset ds(2, {1, 1, 1, 1, 5, 5, 5, 5, 1, 1});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CoverTree tree = build_cover_tree(ds, 2.0, seed);
    check_invariants(tree, ds);
  }
  // A copy of the root inserted first lands directly under it.
  CoverTree tree(ds, 0);
  tree.insert(1);
  CHECK(tree.parent(1) == PointId{0});
  tree.insert(2);
  tree.insert(3);
  CHECK(tree.parent(3) == PointId{2});
}

TEST_CASE("covering invariant on clustered data") {
  const Dataset ds = generate_synthetic(1000, 8, 5, 0.3, 3);
  check_invariants(build_cover_tree(ds), ds);
  check_invariants(build_cover_tree(ds, 1.3, 7), ds);
  check_invariants(build_cover_tree(ds, 4.0, 8), ds);
}

TEST_CASE("random and sorted insertion orders both satisfy the invariants") {
  const Dataset ds = generate_synthetic(500, 4, 2, 1.0, 4);
  const CoverTree shuffled = build_cover_tree(ds, 2.0, 11);
  check_invariants(shuffled, ds);

  CoverTree sorted(ds, 0);
  for (PointId p = 1; p < ds.size(); ++p) sorted.insert(p);
  check_invariants(sorted, ds);
}

TEST_CASE("build is deterministic for a seed") {
  const Dataset ds = generate_synthetic(300, 3, 2, 1.0, 5);
  const CoverTree a = build_cover_tree(ds, 2.0, 3), b = build_cover_tree(ds, 2.0, 3);
  for (PointId p = 0; p < ds.size(); ++p) {
    CHECK(a.parent(p) == b.parent(p));
    CHECK(a.level(p) == b.level(p));
  }
}

TEST_CASE("leaves have no children and child counts sum to n - 1") {
  const Dataset ds = generate_synthetic(400, 5, 3, 0.5, 6);
  const CoverTree tree = build_cover_tree(ds, 2.0, 1);
  std::size_t total = 0, leaves = 0;
  for (PointId p = 0; p < ds.size(); ++p) {
    total += tree.children(p).size();
    leaves += tree.children(p).empty();
  }
  CHECK(total == ds.size() - 1);
  CHECK(leaves > 0);
}
