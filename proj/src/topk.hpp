#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg::detail {

/// k best points for `query` by (distance, id), skipping `exclude`. Uses a
/// bounded max-heap so memory stays O(k).
inline std::vector<Neighbor> topk_scan(const Dataset& dataset, std::span<const float> query, std::size_t k,
                                       std::size_t exclude) {
  std::vector<Neighbor> heap;
  if (k == 0) return heap;
  heap.reserve(k + 1);
  const std::size_t dim = dataset.dim();
  for (PointId j = 0; j < dataset.size(); ++j) {
    if (j == exclude) continue;
    const Neighbor cand{j, squared_l2_unchecked(query.data(), dataset.row(j).data(), dim)};
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), closer);
    } else if (closer(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), closer);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), closer);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

}  // namespace tbsg::detail
