#include <algorithm>

#include "tbsg/index.hpp"

namespace tbsg {

void SearchParams::validate() const {
  if (k == 0) throw UsageError("k must be >= 1");
  if (k > l) throw UsageError("k (" + std::to_string(k) + ") must not exceed pool size l (" + std::to_string(l) + ")");
}

Searcher::Searcher(const TbsgIndex& index, const Dataset& dataset)
    : index_(&index), dataset_(&dataset), seen_(index.n, 0) {
  if (index.n != dataset.size()) throw UsageError("index and dataset sizes differ");
}

// Result pool semantics: the pool always holds the best `l` points evaluated
// so far under the (distance, id) order; each step expands the closest
// unvisited entry. A point is evaluated at most once per query. Re-offering a
// point already dropped from the pool could never bring it back, because the
// pool's worst entry only improves.
SearchResult Searcher::search(std::span<const float> query, const SearchParams& params,
                              std::optional<PointId> start) {
  params.validate();
  const Dataset& ds = *dataset_;
  if (query.size() != ds.dim()) {
    throw UsageError("query dimension " + std::to_string(query.size()) + " does not match dataset dimension " +
                     std::to_string(ds.dim()));
  }
  SearchResult result;
  if (index_->n == 0) return result;
  const PointId entry = start.value_or(index_->enter_point);
  if (entry >= index_->n) throw UsageError("search start point out of range");

  if (++epoch_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    epoch_ = 1;
  }
  const std::size_t l = params.l;
  const std::size_t dim = ds.dim();
  pool_.clear();
  pool_.reserve(l + 1);

  seen_[entry] = epoch_;
  pool_.push_back({entry, squared_l2_unchecked(query.data(), ds.row(entry).data(), dim), false});
  result.distance_evals = 1;

  auto entry_closer = [](const Entry& a, const Entry& b) {
    return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.id < b.id);
  };

  std::size_t cursor = 0;
  while (cursor < pool_.size()) {
    if (pool_[cursor].visited) {
      ++cursor;
      continue;
    }
    pool_[cursor].visited = true;
    const PointId node = pool_[cursor].id;
    std::size_t first_insert = pool_.size();
    for (PointId nb : index_->adjacency[node]) {
      if (seen_[nb] == epoch_) continue;
      seen_[nb] = epoch_;
      ++result.distance_evals;
      const Entry cand{nb, squared_l2_unchecked(query.data(), ds.row(nb).data(), dim), false};
      if (pool_.size() == l && !entry_closer(cand, pool_.back())) continue;
      const auto it = std::upper_bound(pool_.begin(), pool_.end(), cand, entry_closer);
      const auto pos = static_cast<std::size_t>(it - pool_.begin());
      pool_.insert(it, cand);
      if (pool_.size() > l) pool_.pop_back();
      first_insert = std::min(first_insert, pos);
    }
    cursor = std::min(cursor + 1, first_insert);
  }

  const std::size_t take = std::min(params.k, pool_.size());
  result.ids.reserve(take);
  result.sq_dists.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    result.ids.push_back(pool_[i].id);
    result.sq_dists.push_back(pool_[i].sq_dist);
  }
  return result;
}

SearchResult search_knn(const TbsgIndex& index, const Dataset& dataset, std::span<const float> query,
                        const SearchParams& params, std::optional<PointId> start) {
  Searcher searcher(index, dataset);
  return searcher.search(query, params, start);
}

}  // namespace tbsg
