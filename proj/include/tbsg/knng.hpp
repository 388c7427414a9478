#pragma once

#include <cstdint>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg {

using NeighborLists = std::vector<std::vector<Neighbor>>;

/// Directed K-nearest-neighbor graph. Every list holds min(K, n - 1) entries
/// sorted by (distance, id), without self-loops or duplicates.
struct KnnGraph {
  std::size_t k = 0;
  NeighborLists lists;

  std::size_t size() const noexcept { return lists.size(); }
  friend bool operator==(const KnnGraph&, const KnnGraph&) = default;
};

/// Symmetric closure of a KnnGraph: (u, v) present iff (v, u) present.
struct BKnnGraph {
  NeighborLists lists;

  std::size_t size() const noexcept { return lists.size(); }
  friend bool operator==(const BKnnGraph&, const BKnnGraph&) = default;
};

/// Brute-force exact KNNG; K >= n is clamped to n - 1. The serial path is the
/// reference implementation (full sort per node); the parallel path uses a
/// bounded partial sort and must agree with it exactly.
KnnGraph build_exact_knng(const Dataset& dataset, std::size_t k, Execution exec = Execution::parallel);

struct NnDescentParams {
  std::size_t k = 20;
  std::size_t iterations = 10;
  double sample_rate = 1.0;  // fraction of K sampled as join candidates each round, in (0, 1]
  std::uint64_t seed = 2024;
  /// Stop early once a round changes fewer than delta * n * K entries.
  double delta = 0.0;
};

struct NnDescentStats {
  std::size_t iterations_run = 0;
  std::vector<std::size_t> updates_per_iteration;
};

/// Approximate KNNG by NN-descent (neighbor-of-neighbor local joins). Falls back
/// to the exact builder when n <= K + 1. Output depends only on the inputs and
/// the seed, never on the thread count.
KnnGraph build_knng(const Dataset& dataset, const NnDescentParams& params, NnDescentStats* stats = nullptr,
                    Execution exec = Execution::parallel);

/// Mean over nodes of |approx_i ∩ exact_i| / K.
double knng_recall(const KnnGraph& approx, const KnnGraph& exact);

/// Union of the graph's edges and their reversals; lists sorted by (distance, id).
BKnnGraph add_reverse_edges(const KnnGraph& graph);

}  // namespace tbsg
