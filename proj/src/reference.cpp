#include "tbsg/reference.hpp"

#include <algorithm>

namespace tbsg::reference {

std::vector<Neighbor> sorted_scan(const Dataset& dataset, std::span<const float> query, std::size_t exclude) {
  std::vector<Neighbor> all;
  all.reserve(dataset.size());
  for (PointId j = 0; j < dataset.size(); ++j) {
    if (j == exclude) continue;
    all.push_back({j, squared_l2_unchecked(query.data(), dataset.row(j).data(), dataset.dim())});
  }
  std::sort(all.begin(), all.end(), closer);
  return all;
}

std::vector<std::vector<Neighbor>> exact_knn_lists(const Dataset& dataset, std::size_t k) {
  std::vector<std::vector<Neighbor>> lists(dataset.size());
  for (PointId i = 0; i < dataset.size(); ++i) {
    auto all = sorted_scan(dataset, dataset.row(i), i);
    all.resize(std::min(k, all.size()));
    lists[i] = std::move(all);
  }
  return lists;
}

std::vector<std::vector<PointId>> topk_ids(const Dataset& dataset, const Dataset& queries, std::size_t k) {
  std::vector<std::vector<PointId>> out(queries.size());
  for (PointId q = 0; q < queries.size(); ++q) {
    const auto all = sorted_scan(dataset, queries.row(q), dataset.size());
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out[q].push_back(all[i].id);
  }
  return out;
}

}  // namespace tbsg::reference
