#include "tbsg/edge_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tbsg {

double hyperplane_offset(const TriangleGeom& g) {
  if (!(g.d_sv > 0.0)) throw UsageError("degenerate geometry: s and v coincide");
  return (g.d_se * g.d_se - g.d_ve * g.d_ve) / (2.0 * g.d_sv);
}

namespace {

double chord_ratio(const TriangleGeom& g) {
  if (!(g.r > 0.0)) throw UsageError("query radius must be positive");
  return std::clamp(hyperplane_offset(g) / g.r, -1.0, 1.0);
}

}  // namespace

double min_prob(const TriangleGeom& g) { return 1.0 - std::acos(chord_ratio(g)) / std::numbers::pi; }

double disk_prob(const TriangleGeom& g) {
  const double phi = 2.0 * std::acos(chord_ratio(g));
  return 1.0 - (phi - std::sin(phi)) / (2.0 * std::numbers::pi);
}

bool realizable(const TriangleGeom& g) {
  if (!(g.d_sv > 0.0) || !(g.d_se >= 0.0) || !(g.d_ve >= 0.0)) return false;
  const double tol = 1e-9 * std::max({g.d_se, g.d_sv, g.d_ve});
  return g.d_ve <= g.d_se + g.d_sv + tol && g.d_ve >= std::abs(g.d_se - g.d_sv) - tol;
}

void StrategyParams::validate() const {
  if (m == 0) throw UsageError("max out-degree m must be >= 1");
  switch (strategy) {
    case Strategy::tbsg:
      if (!(mp >= 0.5) || !std::isfinite(mp)) throw UsageError("mp must be a finite value >= 0.5");
      break;
    case Strategy::nssg:
      if (!(alpha_t_degrees > 0.0 && alpha_t_degrees <= 60.0)) throw UsageError("alpha_t must be in (0, 60] degrees");
      break;
    case Strategy::rng:
      break;
  }
}

std::vector<Neighbor> select_neighbors(PointId s, std::span<const Neighbor> candidates, const StrategyParams& params,
                                       const Dataset& dataset) {
  params.validate();
  const std::size_t n = dataset.size();
  if (s >= n) throw UsageError("select_neighbors: node id out of range");
  const bool use_fixed_r = params.strategy == Strategy::tbsg && params.r_mode == RadiusMode::fixed;
  if (use_fixed_r && params.fixed_r.size() != n) throw UsageError("fixed radius mode needs one radius per node");

  std::vector<Neighbor> pool;
  pool.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.id >= n) throw UsageError("select_neighbors: candidate id " + std::to_string(c.id) + " out of range");
    if (c.id == s) continue;
    const double sq = squared_l2(dataset, s, c.id);
    if (sq == 0.0) continue;  // exact duplicate of s
    pool.push_back({c.id, sq});
  }
  std::sort(pool.begin(), pool.end(), closer);
  pool.erase(std::unique(pool.begin(), pool.end(), [](const Neighbor& a, const Neighbor& b) { return a.id == b.id; }),
             pool.end());

  const double cos_alpha_t = std::cos(params.alpha_t_degrees * std::numbers::pi / 180.0);

  std::vector<Neighbor> kept;
  std::vector<double> kept_dist;  // d(s, v) per kept neighbor
  kept.reserve(params.m);
  kept_dist.reserve(params.m);
  for (const auto& e : pool) {
    if (kept.size() == params.m) break;
    const double d_se = std::sqrt(e.sq_dist);
    bool exclude = false;
    for (std::size_t j = 0; j < kept.size() && !exclude; ++j) {
      const double sq_ve = squared_l2(dataset, kept[j].id, e.id);
      switch (params.strategy) {
        case Strategy::rng:
          exclude = sq_ve < e.sq_dist;
          break;
        case Strategy::nssg: {
          const double cos_vse = (kept[j].sq_dist + e.sq_dist - sq_ve) / (2.0 * kept_dist[j] * d_se);
          exclude = cos_vse >= cos_alpha_t - 1e-9;
          break;
        }
        case Strategy::tbsg:
          if (sq_ve < e.sq_dist) {
            // A node without any non-duplicate neighbor has no fixed radius; fall back to d(s, e).
            const double r = use_fixed_r && params.fixed_r[s] > 0.0 ? params.fixed_r[s] : d_se;
            exclude = min_prob({d_se, kept_dist[j], std::sqrt(sq_ve), r}) >= params.mp;
          }
          break;
      }
    }
    if (!exclude) {
      kept.push_back(e);
      kept_dist.push_back(d_se);
    }
  }
  return kept;
}

}  // namespace tbsg
