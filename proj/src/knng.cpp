#include "tbsg/knng.hpp"

#include <algorithm>
#include <cstdint>

#include "tbsg/reference.hpp"
#include "topk.hpp"

namespace tbsg {

KnnGraph build_exact_knng(const Dataset& dataset, std::size_t k, Execution exec) {
  if (k == 0) throw UsageError("K must be >= 1");
  const std::size_t n = dataset.size();
  KnnGraph graph;
  graph.k = n == 0 ? 0 : std::min(k, n - 1);
  if (exec == Execution::serial) {
    graph.lists = reference::exact_knn_lists(dataset, graph.k);
    return graph;
  }
  graph.lists.resize(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto id = static_cast<PointId>(i);
    graph.lists[id] = detail::topk_scan(dataset, dataset.row(id), graph.k, id);
  }
  return graph;
}

double knng_recall(const KnnGraph& approx, const KnnGraph& exact) {
  if (approx.size() != exact.size()) throw UsageError("knng_recall: graphs cover different node counts");
  if (approx.k != exact.k) throw UsageError("knng_recall: graphs use different K");
  if (exact.size() == 0 || exact.k == 0) return 1.0;
  double total = 0.0;
  std::vector<PointId> a, b;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    a.clear();
    b.clear();
    for (const auto& nb : approx.lists[i]) a.push_back(nb.id);
    for (const auto& nb : exact.lists[i]) b.push_back(nb.id);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<PointId> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(exact.k);
  }
  return total / static_cast<double>(exact.size());
}

BKnnGraph add_reverse_edges(const KnnGraph& graph) {
  const std::size_t n = graph.size();
  BKnnGraph out;
  out.lists.resize(n);
  for (PointId u = 0; u < n; ++u) {
    for (const auto& nb : graph.lists[u]) {
      if (nb.id >= n) throw UsageError("add_reverse_edges: neighbor id out of range");
      out.lists[u].push_back(nb);
      out.lists[nb.id].push_back({u, nb.sq_dist});
    }
  }
  for (auto& list : out.lists) {
    // Keep the smallest distance per id, then restore (distance, id) order.
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.id < b.id || (a.id == b.id && a.sq_dist < b.sq_dist);
    });
    list.erase(std::unique(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.id == b.id; }),
               list.end());
    std::sort(list.begin(), list.end(), closer);
  }
  return out;
}

}  // namespace tbsg
