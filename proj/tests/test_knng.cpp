#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tbsg/io.hpp"
#include "tbsg/knng.hpp"
#include "tbsg/random.hpp"

#ifdef TBSG_HAVE_OPENMP
#include <omp.h>
#endif

using namespace tbsg;

namespace {

Dataset uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n * dim);
  for (auto& x : v) x = static_cast<float>(rng.uniform01());
  return Dataset(dim, std::move(v));
}

std::vector<PointId> ids_of(const std::vector<Neighbor>& list) {
  std::vector<PointId> out;
  for (const auto& nb : list) out.push_back(nb.id);
  return out;
}

void check_well_formed(const KnnGraph& g, const Dataset& ds) {
  for (PointId u = 0; u < g.size(); ++u) {
    const auto& list = g.lists[u];
    CHECK(list.size() == g.k);
    std::set<PointId> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(list[i].id != u);
      CHECK(seen.insert(list[i].id).second);
      CHECK(list[i].sq_dist == doctest::Approx(squared_l2(ds, u, list[i].id)).epsilon(1e-4));
      if (i > 0) CHECK(closer(list[i - 1], list[i]));
    }
  }
}

}  // namespace

TEST_CASE("exact knng on three collinear points") {
  const Dataset ds(1, {0.0f, 1.0f, 3.0f});
  for (auto exec : {Execution::serial, Execution::parallel}) {
    const KnnGraph g = build_exact_knng(ds, 1, exec);
    CHECK(g.k == 1);
    CHECK(g.lists[0][0].id == 1);
    CHECK(g.lists[1][0].id == 0);
    CHECK(g.lists[2][0].id == 1);
  }
}

TEST_CASE("K >= n is clamped and lists are complete") {
  const Dataset ds = uniform_points(12, 3, 1);
  const KnnGraph g = build_exact_knng(ds, 50);
  CHECK(g.k == 11);
  for (PointId u = 0; u < 12; ++u) {
    auto ids = ids_of(g.lists[u]);
    std::sort(ids.begin(), ids.end());
    std::vector<PointId> others;
    for (PointId v = 0; v < 12; ++v) {
      if (v != u) others.push_back(v);
    }
    CHECK(ids == others);
  }
  CHECK_THROWS_AS(build_exact_knng(ds, 0), UsageError);
}

TEST_CASE("exact knng matches a per-node full sort") {
  const Dataset ds = uniform_points(500, 6, 2);
  const KnnGraph g = build_exact_knng(ds, 10);
  check_well_formed(g, ds);
  for (PointId u = 0; u < ds.size(); ++u) {
    auto order = oracle::full_sort(ds, ds.row(u));
    order.erase(std::find(order.begin(), order.end(), u));
    order.resize(10);
    CHECK(ids_of(g.lists[u]) == order);
  }
}

TEST_CASE("serial and parallel exact builders agree, including ties") {
  // Integer grid points produce many equal distances.
  std::vector<float> v;
  for (int x = 0; x < 12; ++x) {
    for (int y = 0; y < 12; ++y) {
      v.push_back(static_cast<float>(x));
      v.push_back(static_cast<float>(y));
    }
  }
  const Dataset ds(2, v);
  CHECK(build_exact_knng(ds, 8, Execution::serial) == build_exact_knng(ds, 8, Execution::parallel));
  const Dataset r = uniform_points(300, 5, 3);
  CHECK(build_exact_knng(r, 7, Execution::serial) == build_exact_knng(r, 7, Execution::parallel));
}

TEST_CASE("nn-descent falls back to the exact builder on tiny inputs") {
  const Dataset ds = uniform_points(21, 4, 4);
  NnDescentParams p;
  p.k = 20;
  CHECK(build_knng(ds, p) == build_exact_knng(ds, 20));
  p.k = 30;
  CHECK(build_knng(ds, p) == build_exact_knng(ds, 30));
}

TEST_CASE("nn-descent is deterministic and thread-count independent") {
  const Dataset ds = generate_synthetic(1500, 8, 3, 0.5, 5);
  NnDescentParams p;
  p.k = 15;
  p.iterations = 5;
  p.sample_rate = 0.5;
  const KnnGraph a = build_knng(ds, p);
  CHECK(a == build_knng(ds, p));
  CHECK(a == build_knng(ds, p, nullptr, Execution::serial));
#ifdef TBSG_HAVE_OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const KnnGraph one = build_knng(ds, p);
  omp_set_num_threads(4);
  const KnnGraph four = build_knng(ds, p);
  omp_set_num_threads(saved);
  CHECK(one == a);
  CHECK(four == a);
#endif
  p.seed = 99;
  CHECK_FALSE(build_knng(ds, p) == a);
  check_well_formed(a, ds);
}

TEST_CASE("nn-descent reaches high recall on clustered data") {
  const Dataset ds = generate_synthetic(2000, 16, 4, 0.5, 6);
  NnDescentParams p;
  p.k = 20;
  p.iterations = 10;
  p.sample_rate = 1.0;
  NnDescentStats stats;
  const KnnGraph approx = build_knng(ds, p, &stats);
  const double r = knng_recall(approx, build_exact_knng(ds, 20));
  MESSAGE("nn-descent recall " << r << " after " << stats.iterations_run << " rounds");
  CHECK(r >= 0.90);
  CHECK(stats.iterations_run >= 1);
  CHECK(stats.updates_per_iteration.size() == stats.iterations_run);
  check_well_formed(approx, ds);
}

TEST_CASE("nn-descent converges on small inputs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset ds = uniform_points(200, 8, seed);
    NnDescentParams p;
    p.k = 10;
    p.iterations = 100;
    p.sample_rate = 1.0;
    p.seed = seed;
    CHECK(knng_recall(build_knng(ds, p), build_exact_knng(ds, 10)) >= 0.99);
  }
}

TEST_CASE("nn-descent rejects bad parameters") {
  const Dataset ds = uniform_points(50, 2, 1);
  NnDescentParams p;
  p.k = 0;
  CHECK_THROWS_AS(build_knng(ds, p), UsageError);
  p = {};
  p.iterations = 0;
  CHECK_THROWS_AS(build_knng(ds, p), UsageError);
  p = {};
  p.sample_rate = 0.0;
  CHECK_THROWS_AS(build_knng(ds, p), UsageError);
  p.sample_rate = 1.5;
  CHECK_THROWS_AS(build_knng(ds, p), UsageError);
}

TEST_CASE("knng recall on constructed graphs") {
  KnnGraph exact{2, {{{1, 1}, {2, 2}}, {{0, 1}, {2, 1}}, {{1, 1}, {0, 2}}}};
  CHECK(knng_recall(exact, exact) == 1.0);

  KnnGraph disjoint{2, {{{3, 1}, {4, 2}}, {{3, 1}, {4, 1}}, {{3, 1}, {4, 2}}}};
  CHECK(knng_recall(disjoint, exact) == 0.0);

  KnnGraph half{2, {{{1, 1}, {4, 2}}, {{0, 1}, {4, 1}}, {{1, 1}, {4, 2}}}};
  CHECK(knng_recall(half, exact) == 0.5);

  KnnGraph wrong_k{1, {{{1, 1}}, {{0, 1}}, {{1, 1}}}};
  CHECK_THROWS_AS(knng_recall(wrong_k, exact), UsageError);
  KnnGraph wrong_n{2, {{{1, 1}, {2, 2}}}};
  CHECK_THROWS_AS(knng_recall(wrong_n, exact), UsageError);
}

TEST_CASE("reverse edges of a symmetric graph change nothing") {
  const KnnGraph g{1, {{{1, 4}}, {{0, 4}}}};
  const BKnnGraph b = add_reverse_edges(g);
  CHECK(b.lists == g.lists);
}

TEST_CASE("a single edge gains its reversal") {
  const KnnGraph g{1, {{{1, 9}}, {}, {}}};
  const BKnnGraph b = add_reverse_edges(g);
  CHECK(b.lists[0] == std::vector<Neighbor>{{1, 9}});
  CHECK(b.lists[1] == std::vector<Neighbor>{{0, 9}});
  CHECK(b.lists[2].empty());
}

TEST_CASE("reverse-edge closure is symmetric and contains the input") {
  const Dataset ds = uniform_points(300, 4, 8);
  NnDescentParams p;
  p.k = 8;
  p.iterations = 3;
  const KnnGraph g = build_knng(ds, p);
  const BKnnGraph b = add_reverse_edges(g);
  std::set<std::pair<PointId, PointId>> edges;
  for (PointId u = 0; u < b.size(); ++u) {
    std::set<PointId> ids;
    for (std::size_t i = 0; i < b.lists[u].size(); ++i) {
      const auto& nb = b.lists[u][i];
      CHECK(nb.id != u);
      CHECK(ids.insert(nb.id).second);
      if (i > 0) CHECK(closer(b.lists[u][i - 1], nb));
      edges.insert({u, nb.id});
    }
  }
  for (const auto& [u, v] : edges) CHECK(edges.count({v, u}) == 1);
  for (PointId u = 0; u < g.size(); ++u) {
    for (const auto& nb : g.lists[u]) CHECK(edges.count({u, nb.id}) == 1);
  }
  std::size_t expected = 0;
  for (PointId u = 0; u < g.size(); ++u) {
    for (const auto& nb : g.lists[u]) {
      const bool mutual = std::any_of(g.lists[nb.id].begin(), g.lists[nb.id].end(),
                                      [&](const Neighbor& x) { return x.id == u; });
      expected += mutual ? 1 : 2;
    }
  }
  CHECK(edges.size() == expected);
}
