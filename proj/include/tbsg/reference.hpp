#pragma once

// Straightforward serial implementations of the brute-force kernels. They are
// deliberately simple (full sort, no pruning) and serve as the ground truth
// the OpenMP kernels are tested and benchmarked against.

#include <span>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg::reference {

/// All points except `exclude` (pass size() to exclude nothing), fully sorted by (distance, id).
std::vector<Neighbor> sorted_scan(const Dataset& dataset, std::span<const float> query, std::size_t exclude);

/// Exact KNN lists for every point, K already clamped by the caller.
std::vector<std::vector<Neighbor>> exact_knn_lists(const Dataset& dataset, std::size_t k);

/// Exact top-k ids per query.
std::vector<std::vector<PointId>> topk_ids(const Dataset& dataset, const Dataset& queries, std::size_t k);

}  // namespace tbsg::reference
