#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tbsg/cover_tree.hpp"
#include "tbsg/dataset.hpp"
#include "tbsg/edge_selection.hpp"
#include "tbsg/knng.hpp"

namespace tbsg {

/// How unreachable parts of the pruned graph get linked back in.
enum class Repair {
  none,    // leave the pruned graph as selected
  tree,    // force the pruned cover-tree edge parent -> child
  search,  // link from the nearest node a search from the enter point reaches
};

struct BuildParams {
  std::size_t k = 100;          // KNNG neighbors per node
  std::size_t m = 50;           // max out-degree
  double mp = 0.53;             // min_prob threshold
  RadiusMode r_mode = RadiusMode::dynamic;
  double base = 2.0;            // cover tree radius ratio
  std::size_t iterations = 10;  // NN-descent rounds
  double sample_rate = 0.3;     // NN-descent sampling fraction
  std::uint64_t seed = 2024;
  /// Applied after pruning wherever nodes are unreachable from the enter
  /// point. Repair::none keeps the unrepaired graph for measurement.
  Repair repair = Repair::search;

  friend bool operator==(const BuildParams&, const BuildParams&) = default;
};

/// Named parameter sets matching the published per-dataset configurations.
BuildParams sift_profile();
BuildParams gist_profile();

/// Pruned directed search graph. Adjacency lists are sorted by distance from
/// their owner and hold at most m ids.
struct TbsgIndex {
  std::size_t n = 0;
  std::size_t m = 0;
  PointId enter_point = 0;
  std::vector<std::vector<PointId>> adjacency;
  /// Present on freshly built indexes; not persisted.
  std::optional<BuildParams> build_params;
  /// Edges forced in by connectivity repair (fresh builds only).
  std::size_t repaired_edges = 0;

  std::size_t max_out_degree() const noexcept;
  double mean_out_degree() const noexcept;

  /// Compares the graph only (n, m, enter point, adjacency).
  bool same_graph(const TbsgIndex& other) const noexcept {
    return n == other.n && m == other.m && enter_point == other.enter_point && adjacency == other.adjacency;
  }
};

/// Intermediate products of construction, reusable across several
/// (m, mp) settings over the same data.
struct BuildArtifacts {
  CoverTree tree;
  KnnGraph knng;
  BKnnGraph bknng;
};

BuildArtifacts prepare_build(const Dataset& dataset, const BuildParams& params, Execution exec = Execution::parallel);

/// Per-node edge selection over BKNNG neighbors plus cover-tree children.
TbsgIndex assemble_index(const Dataset& dataset, const BuildArtifacts& artifacts, const BuildParams& params,
                         Execution exec = Execution::parallel);

/// Cover tree, NN-descent KNNG, reverse edges, then pruning. Deterministic for
/// a fixed seed at any thread count.
TbsgIndex build_tbsg(const Dataset& dataset, const BuildParams& params, Execution exec = Execution::parallel);

/// Fraction of nodes reachable from the enter point along directed edges.
double reachable_fraction(const TbsgIndex& index);

struct SearchParams {
  std::size_t l = 100;  // result pool size
  std::size_t k = 10;   // neighbors returned, k <= l

  void validate() const;
};

struct SearchResult {
  std::vector<PointId> ids;          // ascending distance to the query
  std::vector<double> sq_dists;      // matching squared distances
  std::size_t distance_evals = 0;    // one per pool insertion attempt
};

/// Best-first search with a bounded result pool. Holds per-query scratch so a
/// Searcher must not be shared between threads; create one per thread.
class Searcher {
 public:
  Searcher(const TbsgIndex& index, const Dataset& dataset);

  /// Starts from `start` when given, else from the index enter point.
  SearchResult search(std::span<const float> query, const SearchParams& params,
                      std::optional<PointId> start = std::nullopt);

 private:
  struct Entry {
    PointId id;
    double sq_dist;
    bool visited;
  };

  const TbsgIndex* index_;
  const Dataset* dataset_;
  std::vector<std::uint32_t> seen_;  // epoch stamp per node
  std::uint32_t epoch_ = 0;
  std::vector<Entry> pool_;
};

/// Convenience wrapper around a one-off Searcher.
SearchResult search_knn(const TbsgIndex& index, const Dataset& dataset, std::span<const float> query,
                        const SearchParams& params, std::optional<PointId> start = std::nullopt);

// Binary layout, little-endian throughout:
//   "TBSG" | u32 version (=1) | u32 n | u32 m | u32 enter_point |
//   n x ( u32 degree | degree x u32 neighbor id )
inline constexpr std::uint32_t kIndexFormatVersion = 1;

std::vector<std::byte> serialize_index(const TbsgIndex& index);
TbsgIndex deserialize_index(std::span<const std::byte> bytes);
void save_index(const TbsgIndex& index, const std::filesystem::path& path);
TbsgIndex load_index(const std::filesystem::path& path);

}  // namespace tbsg
