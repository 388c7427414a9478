#include "tbsg/cover_tree.hpp"

#include <cmath>
#include <numeric>

#include "tbsg/random.hpp"

namespace tbsg {

CoverTree::CoverTree(const Dataset& dataset, PointId root, double base)
    : dataset_(&dataset),
      base_(base),
      root_(root),
      levels_(dataset.size(), 0),
      parents_(dataset.size(), kNoParent),
      children_(dataset.size()),
      present_(dataset.size(), 0) {
  if (dataset.empty()) throw UsageError("cover tree needs a non-empty dataset");
  if (!(base > 1.0) || !std::isfinite(base)) throw UsageError("cover tree base must be a finite value > 1");
  if (root >= dataset.size()) throw UsageError("cover tree root out of range");
  present_[root] = 1;
  inserted_ = 1;
}

double CoverTree::radius_for(int level) const { return std::pow(base_, level); }

void CoverTree::check_member(PointId p) const {
  if (!contains(p)) throw UsageError("point " + std::to_string(p) + " is not in the cover tree");
}

int CoverTree::level(PointId p) const {
  check_member(p);
  return levels_[p];
}

std::optional<PointId> CoverTree::parent(PointId p) const {
  check_member(p);
  if (parents_[p] == kNoParent) return std::nullopt;
  return parents_[p];
}

std::span<const PointId> CoverTree::children(PointId p) const {
  check_member(p);
  return children_[p];
}

double CoverTree::covering_radius(PointId p) const { return radius_for(level(p)); }

void CoverTree::insert(PointId p) {
  if (p >= capacity()) throw UsageError("point " + std::to_string(p) + " out of range for cover tree");
  if (present_[p]) throw UsageError("point " + std::to_string(p) + " is already in the cover tree");
  const Dataset& ds = *dataset_;

  const double root_sq = squared_l2(ds, root_, p);
  if (children_[root_].empty() && root_sq > 0.0) {
    // Fit the root level to the first real distance seen.
    const double d = std::sqrt(root_sq);
    int lvl = static_cast<int>(std::ceil(std::log(d) / std::log(base_)));
    while (radius_for(lvl) < d) ++lvl;
    while (radius_for(lvl - 1) >= d) --lvl;
    levels_[root_] = lvl;
  }
  while (true) {
    const double r = radius_for(levels_[root_]);
    if (root_sq <= r * r) break;
    ++levels_[root_];
  }

  PointId current = root_;
  while (true) {
    PointId best = kNoParent;
    double best_sq = 0.0;
    for (PointId c : children_[current]) {
      const double sq = squared_l2(ds, c, p);
      if (best == kNoParent || sq < best_sq || (sq == best_sq && c < best)) {
        best = c;
        best_sq = sq;
      }
    }
    if (best != kNoParent) {
      const double r = radius_for(levels_[best]);
      if (best_sq <= r * r) {
        current = best;
        continue;
      }
    }
    break;
  }

  levels_[p] = levels_[current] - 1;
  parents_[p] = current;
  children_[current].push_back(p);
  present_[p] = 1;
  ++inserted_;
}

CoverTree build_cover_tree(const Dataset& dataset, double base, std::uint64_t seed) {
  CoverTree tree(dataset, 0, base);
  const auto n = static_cast<std::uint32_t>(dataset.size());
  std::vector<PointId> order(n > 0 ? n - 1 : 0);
  std::iota(order.begin(), order.end(), PointId{1});
  Rng rng(mix_seed(seed, 0xc07e));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  for (PointId p : order) tree.insert(p);
  return tree;
}

}  // namespace tbsg
