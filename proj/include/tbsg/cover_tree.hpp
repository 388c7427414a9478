#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg {

/// Simplified (nearest-ancestor) cover tree: one node per dataset point.
///
/// Every node p has an integer level and covering radius base^level(p); each
/// child c of p satisfies d(p, c) <= base^level(p) and level(c) < level(p).
/// The tree serves as the construction skeleton for the search graph: its
/// root is the search enter point and its parent-child edges give every
/// point a path from the root.
class CoverTree {
 public:
  static constexpr PointId kNoParent = std::numeric_limits<PointId>::max();

  /// Empty tree over `dataset` rooted at `root`. The dataset must outlive the tree.
  CoverTree(const Dataset& dataset, PointId root, double base = 2.0);

  /// Descends from the root toward the nearest child whose ball contains p and
  /// attaches p one level below the last node that covers it. The root level
  /// grows when p lies outside the root's ball.
  void insert(PointId p);

  PointId root() const noexcept { return root_; }
  double base() const noexcept { return base_; }
  std::size_t size() const noexcept { return inserted_; }
  std::size_t capacity() const noexcept { return levels_.size(); }

  bool contains(PointId p) const noexcept { return p < capacity() && present_[p]; }
  int level(PointId p) const;
  std::optional<PointId> parent(PointId p) const;
  std::span<const PointId> children(PointId p) const;

  /// base^level(p).
  double covering_radius(PointId p) const;

 private:
  void check_member(PointId p) const;
  double radius_for(int level) const;

  const Dataset* dataset_;
  double base_;
  PointId root_;
  std::size_t inserted_ = 0;
  std::vector<int> levels_;
  std::vector<PointId> parents_;
  std::vector<std::vector<PointId>> children_;
  std::vector<char> present_;
};

/// Builds the tree over every point. Point 0 is the root; `seed` only shuffles
/// the insertion order of the remaining points.
CoverTree build_cover_tree(const Dataset& dataset, double base = 2.0, std::uint64_t seed = 0);

}  // namespace tbsg
