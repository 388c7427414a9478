#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>

#include "tbsg/knng.hpp"
#include "tbsg/random.hpp"

namespace tbsg {
namespace {

struct PoolEntry {
  PointId id;
  double sq_dist;
  bool is_new;  // not yet used as a join source
  bool fresh;   // inserted during the current round
};

bool entry_closer(const PoolEntry& a, const PoolEntry& b) noexcept {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.id < b.id);
}

// Each node keeps the K best entries under the (distance, id) total order. An
// insertion is accepted iff the candidate beats the current worst and is not
// already present, so after any sequence of insertions the pool is the top-K of
// everything offered. That makes the concurrent join's result independent of
// interleaving.
class NodePools {
 public:
  NodePools(std::size_t n, std::size_t k) : pools_(n), locks_(std::make_unique<std::mutex[]>(n)), k_(k) {}

  std::vector<PoolEntry>& operator[](std::size_t i) { return pools_[i]; }
  const std::vector<PoolEntry>& operator[](std::size_t i) const { return pools_[i]; }

  void offer(PointId target, PointId id, double sq_dist, const PoolEntry& snapshot_worst) {
    const PoolEntry cand{id, sq_dist, true, true};
    // The worst entry only improves during a round, so anything not beating
    // the round-start worst cannot survive.
    if (!entry_closer(cand, snapshot_worst)) return;
    std::lock_guard<std::mutex> guard(locks_[target]);
    auto& pool = pools_[target];
    if (pool.size() == k_ && !entry_closer(cand, pool.back())) return;
    for (const auto& e : pool) {
      if (e.id == id) return;
    }
    pool.insert(std::upper_bound(pool.begin(), pool.end(), cand, entry_closer), cand);
    if (pool.size() > k_) pool.pop_back();
  }

 private:
  std::vector<std::vector<PoolEntry>> pools_;
  std::unique_ptr<std::mutex[]> locks_;
  std::size_t k_;
};

void sort_unique(std::vector<PointId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

std::vector<PointId> sample_ids(const std::vector<PointId>& ids, std::size_t limit, Rng& rng) {
  if (ids.size() <= limit) return ids;
  std::vector<PointId> out;
  out.reserve(limit);
  for (auto idx : rng.sample_distinct(static_cast<std::uint32_t>(ids.size()), static_cast<std::uint32_t>(limit))) {
    out.push_back(ids[idx]);
  }
  return out;
}

// Independent random streams per purpose, then per (round, node).
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kForwardStream = 2;
constexpr std::uint64_t kReverseStream = 3;

}  // namespace

KnnGraph build_knng(const Dataset& dataset, const NnDescentParams& params, NnDescentStats* stats, Execution exec) {
  if (params.k == 0) throw UsageError("K must be >= 1");
  if (params.iterations == 0) throw UsageError("iterations must be >= 1");
  if (!(params.sample_rate > 0.0 && params.sample_rate <= 1.0)) throw UsageError("sample_rate must be in (0, 1]");
  const std::size_t n = dataset.size();
  const std::size_t k = params.k;
  if (n <= k + 1) {
    if (stats) *stats = {};
    return build_exact_knng(dataset, k, exec);
  }

  const bool parallel = exec == Execution::parallel;
  const auto count = static_cast<std::int64_t>(n);
  const std::size_t sample = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(params.sample_rate * k)));

  NodePools pools(n, k);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto self = static_cast<PointId>(i);
    Rng rng(mix_seed(mix_seed(params.seed, kInitStream), 0, self));
    auto& pool = pools[self];
    pool.reserve(k);
    for (auto j : rng.sample_distinct(static_cast<std::uint32_t>(n - 1), static_cast<std::uint32_t>(k))) {
      const PointId other = j >= self ? j + 1 : j;
      pool.push_back({other, squared_l2(dataset, self, other), true, false});
    }
    std::sort(pool.begin(), pool.end(), entry_closer);
  }

  std::vector<std::vector<PointId>> new_ids(n), old_ids(n), rev_new(n), rev_old(n);
  std::vector<PoolEntry> worst(n);
  if (stats) *stats = {};

  for (std::size_t round = 1; round <= params.iterations; ++round) {
    // Sample forward candidates; sampled "new" entries become "old".
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto v = static_cast<PointId>(i);
      auto& pool = pools[v];
      new_ids[v].clear();
      old_ids[v].clear();
      std::vector<std::size_t> fresh_slots;
      for (std::size_t s = 0; s < pool.size(); ++s) {
        pool[s].fresh = false;
        if (pool[s].is_new) {
          fresh_slots.push_back(s);
        } else {
          old_ids[v].push_back(pool[s].id);
        }
      }
      if (fresh_slots.size() > sample) {
        Rng rng(mix_seed(mix_seed(params.seed, kForwardStream), round, v));
        std::vector<std::size_t> picked;
        for (auto idx : rng.sample_distinct(static_cast<std::uint32_t>(fresh_slots.size()),
                                            static_cast<std::uint32_t>(sample))) {
          picked.push_back(fresh_slots[idx]);
        }
        fresh_slots = std::move(picked);
      }
      for (auto s : fresh_slots) {
        pool[s].is_new = false;
        new_ids[v].push_back(pool[s].id);
      }
      worst[v] = pool.back();
    }

    // Reverse lists are filled in ascending v so their content is deterministic.
    for (auto& r : rev_new) r.clear();
    for (auto& r : rev_old) r.clear();
    for (PointId v = 0; v < n; ++v) {
      for (auto u : new_ids[v]) rev_new[u].push_back(v);
      for (auto u : old_ids[v]) rev_old[u].push_back(v);
    }

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto u = static_cast<PointId>(i);
      Rng rng(mix_seed(mix_seed(params.seed, kReverseStream), round, u));
      auto& nu = new_ids[u];
      auto& ou = old_ids[u];
      const auto extra_new = sample_ids(rev_new[u], sample, rng);
      const auto extra_old = sample_ids(rev_old[u], sample, rng);
      nu.insert(nu.end(), extra_new.begin(), extra_new.end());
      ou.insert(ou.end(), extra_old.begin(), extra_old.end());
      sort_unique(nu);
      sort_unique(ou);
      std::vector<PointId> only_old;
      std::set_difference(ou.begin(), ou.end(), nu.begin(), nu.end(), std::back_inserter(only_old));
      ou = std::move(only_old);
    }

    // Local join: pairs where at least one side is new.
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto v = static_cast<PointId>(i);
      const auto& nv = new_ids[v];
      const auto& ov = old_ids[v];
      auto propose = [&](PointId a, PointId b) {
        const double sq = squared_l2(dataset, a, b);
        pools.offer(a, b, sq, worst[a]);
        pools.offer(b, a, sq, worst[b]);
      };
      for (std::size_t x = 0; x < nv.size(); ++x) {
        for (std::size_t y = x + 1; y < nv.size(); ++y) propose(nv[x], nv[y]);
        for (auto b : ov) {
          if (b != nv[x]) propose(nv[x], b);
        }
      }
    }

    std::size_t updates = 0;
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& e : pools[v]) updates += e.fresh ? 1 : 0;
    }
    if (stats) {
      stats->iterations_run = round;
      stats->updates_per_iteration.push_back(updates);
    }
    if (static_cast<double>(updates) <= params.delta * static_cast<double>(n * k)) break;
  }

  KnnGraph graph;
  graph.k = k;
  graph.lists.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    graph.lists[v].reserve(k);
    for (const auto& e : pools[v]) graph.lists[v].push_back({e.id, e.sq_dist});
  }
  return graph;
}

}  // namespace tbsg
