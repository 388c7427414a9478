#include "tbsg/index.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>

namespace tbsg {

BuildParams sift_profile() {
  BuildParams p;
  p.k = 100;
  p.mp = 0.53;
  p.m = 50;
  return p;
}

BuildParams gist_profile() {
  BuildParams p;
  p.k = 200;
  p.mp = 0.515;
  p.m = 70;
  return p;
}

std::size_t TbsgIndex::max_out_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& list : adjacency) best = std::max(best, list.size());
  return best;
}

double TbsgIndex::mean_out_degree() const noexcept {
  if (adjacency.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& list : adjacency) total += list.size();
  return static_cast<double>(total) / static_cast<double>(adjacency.size());
}

namespace {

std::vector<char> reachable_set(const TbsgIndex& index) {
  std::vector<char> seen(index.n, 0);
  if (index.n == 0) return seen;
  std::vector<PointId> stack{index.enter_point};
  seen[index.enter_point] = 1;
  while (!stack.empty()) {
    const PointId u = stack.back();
    stack.pop_back();
    for (PointId v : index.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

// Inserts p -> c in distance order. A full list gives up its farthest entry
// that was not itself forced; fails when every slot is forced.
bool force_edge(TbsgIndex& index, std::vector<std::vector<PointId>>& forced, const Dataset& dataset, PointId p,
                PointId c) {
  auto& list = index.adjacency[p];
  auto& pinned = forced[p];
  if (std::find(list.begin(), list.end(), c) != list.end()) return false;
  if (list.size() >= index.m) {
    auto victim = std::find_if(list.rbegin(), list.rend(), [&](PointId id) {
      return std::find(pinned.begin(), pinned.end(), id) == pinned.end();
    });
    if (victim == list.rend()) return false;
    list.erase(std::next(victim).base());
  }
  const double sq = squared_l2(dataset, p, c);
  auto pos = std::find_if(list.begin(), list.end(), [&](PointId id) {
    return closer({c, sq}, {id, squared_l2(dataset, p, id)});
  });
  list.insert(pos, c);
  pinned.push_back(c);
  return true;
}

// Every tree edge parent -> child whose child is unreachable while the parent
// is reachable gets forced. Forced edges are never evicted, so each round adds
// at least one and the loop ends; the root reaches every node along tree
// edges once all needed ones are forced.
std::size_t repair_along_tree(TbsgIndex& index, const CoverTree& tree, const Dataset& dataset) {
  std::vector<std::vector<PointId>> forced(index.n);
  std::size_t added = 0;
  while (true) {
    const auto seen = reachable_set(index);
    std::size_t round_added = 0;
    for (PointId c = 0; c < index.n; ++c) {
      if (seen[c]) continue;
      const auto parent = tree.parent(c);
      if (parent && seen[*parent] && force_edge(index, forced, dataset, *parent, c)) ++round_added;
    }
    if (round_added == 0) break;
    added += round_added;
  }
  return added;
}

std::vector<PointId> tree_order(const CoverTree& tree) {
  std::vector<PointId> order{tree.root()};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (PointId c : tree.children(order[i])) order.push_back(c);
  }
  return order;
}

void mark_from(const TbsgIndex& index, PointId start, std::vector<char>& seen) {
  std::vector<PointId> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const PointId u = stack.back();
    stack.pop_back();
    for (PointId v : index.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
}

// A tree parent can sit anywhere inside its ball, so a forced tree edge makes
// a region reachable without making it findable. Here every node, in tree
// breadth-first order so cluster representatives come first, is searched for
// from the enter point. When the search does not return the node itself, the
// closest node it did return gets an edge to it: the same place a query aimed
// at that region ends up.
std::size_t repair_by_search(TbsgIndex& index, const CoverTree& tree, const Dataset& dataset, std::size_t pool) {
  const std::vector<PointId> order = tree_order(tree);
  std::vector<std::vector<PointId>> forced(index.n);
  pool = std::min(pool, index.n);
  Searcher searcher(index, dataset);
  auto link = [&](PointId c, const std::vector<PointId>& found) {
    for (PointId anchor : found) {
      if (anchor != c && force_edge(index, forced, dataset, anchor, c)) return true;
    }
    return false;
  };

  // New edges reroute other searches, so a few passes are needed before every
  // node finds itself; two or three are typical.
  std::size_t added = 0;
  for (int round = 0; round < 8; ++round) {
    std::size_t round_added = 0;
    for (PointId c : order) {
      const auto found = searcher.search(dataset.row(c), {pool, pool});
      if (found.ids.front() != c) round_added += link(c, found.ids);
    }
    if (round_added == 0) break;
    added += round_added;
  }
  // Evictions above can strand a node that was fine when visited.
  while (true) {
    auto seen = reachable_set(index);
    std::size_t round_added = 0;
    for (PointId c : order) {
      if (seen[c] || !link(c, searcher.search(dataset.row(c), {pool, pool}).ids)) continue;
      mark_from(index, c, seen);
      ++round_added;
    }
    if (round_added == 0) break;
    added += round_added;
  }
  return added;
}

}  // namespace

BuildArtifacts prepare_build(const Dataset& dataset, const BuildParams& params, Execution exec) {
  if (dataset.empty()) throw UsageError("cannot build an index over an empty dataset");
  if (dataset.size() > std::numeric_limits<PointId>::max()) throw UsageError("dataset too large for 32-bit ids");
  NnDescentParams nn;
  nn.k = params.k;
  nn.iterations = params.iterations;
  nn.sample_rate = params.sample_rate;
  nn.seed = params.seed;
  CoverTree tree = build_cover_tree(dataset, params.base, params.seed);
  KnnGraph knng = build_knng(dataset, nn, nullptr, exec);
  BKnnGraph bknng = add_reverse_edges(knng);
  return {std::move(tree), std::move(knng), std::move(bknng)};
}

TbsgIndex assemble_index(const Dataset& dataset, const BuildArtifacts& artifacts, const BuildParams& params,
                         Execution exec) {
  const std::size_t n = dataset.size();
  if (artifacts.bknng.size() != n || artifacts.tree.capacity() != n) {
    throw UsageError("build artifacts do not match the dataset");
  }

  std::vector<double> fixed_r;
  if (params.r_mode == RadiusMode::fixed) {
    fixed_r.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (const auto& nb : artifacts.knng.lists[s]) {
        if (nb.sq_dist > 0.0) {
          fixed_r[s] = nb.distance();
          break;
        }
      }
    }
  }

  StrategyParams strategy;
  strategy.strategy = Strategy::tbsg;
  strategy.mp = params.mp;
  strategy.m = params.m;
  strategy.r_mode = params.r_mode;
  strategy.fixed_r = fixed_r;
  strategy.validate();

  TbsgIndex index;
  index.n = n;
  index.m = params.m;
  index.enter_point = artifacts.tree.root();
  index.adjacency.resize(n);
  index.build_params = params;

  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64) if (exec == Execution::parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto s = static_cast<PointId>(i);
    std::vector<Neighbor> candidates = artifacts.bknng.lists[s];
    const auto children = artifacts.tree.children(s);
    for (PointId c : children) candidates.push_back({c, 0.0});
    auto kept = select_neighbors(s, candidates, strategy, dataset);

    auto& out = index.adjacency[s];
    out.reserve(kept.size());
    for (const auto& nb : kept) out.push_back(nb.id);
  }
  switch (params.repair) {
    case Repair::none:
      break;
    case Repair::tree:
      index.repaired_edges = repair_along_tree(index, artifacts.tree, dataset);
      break;
    case Repair::search:
      index.repaired_edges = repair_by_search(index, artifacts.tree, dataset, 100);
      break;
  }
  return index;
}

TbsgIndex build_tbsg(const Dataset& dataset, const BuildParams& params, Execution exec) {
  const BuildArtifacts artifacts = prepare_build(dataset, params, exec);
  return assemble_index(dataset, artifacts, params, exec);
}

double reachable_fraction(const TbsgIndex& index) {
  if (index.n == 0) return 1.0;
  std::vector<char> seen(index.n, 0);
  std::deque<PointId> frontier{index.enter_point};
  seen[index.enter_point] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const PointId u = frontier.front();
    frontier.pop_front();
    for (PointId v : index.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return static_cast<double>(reached) / static_cast<double>(index.n);
}

}  // namespace tbsg
