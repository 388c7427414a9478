#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tbsg/dataset.hpp"

namespace tbsg {

/// Distances among the node s selecting edges, an already selected neighbor v
/// and a candidate e, plus the query radius r around e.
struct TriangleGeom {
  double d_se = 0.0;
  double d_sv = 0.0;
  double d_ve = 0.0;
  double r = 0.0;
};

/// Signed distance from e to the perpendicular bisector of segment sv,
/// positive on v's side: (d_se^2 - d_ve^2) / (2 d_sv). Throws UsageError when d_sv == 0.
double hyperplane_offset(const TriangleGeom& g);

/// Lower bound on the chance that a query uniformly placed in the radius-r
/// ball around e is closer to v than to s:
///
///   min_prob = 1 - arccos(clamp(h / r, -1, 1)) / pi,   h = hyperplane_offset(g)
///
/// equivalently 1 - phi / (2 pi) with phi the angle subtended by the bisector
/// chord. Equals 0.5 when h == 0 and 1 once the bisector misses the ball.
double min_prob(const TriangleGeom& g);

/// Exact 2-d value of the same probability: 1 - (phi - sin phi) / (2 pi),
/// phi = 2 arccos(clamp(h / r)). Valid as a bound partner only for h >= 0.
double disk_prob(const TriangleGeom& g);

struct ProbEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of Pr[d(v, Q) < d(s, Q)] for Q uniform in the
/// `dim`-dimensional ball of radius r around e, with the triangle embedded in
/// the first two coordinates. Throws UsageError for unrealizable triangles.
ProbEstimate monte_carlo_prob(const TriangleGeom& g, std::size_t dim, std::size_t samples, std::uint64_t seed);

/// True when the three distances satisfy the triangle inequality (within a
/// small relative tolerance) and d_sv > 0.
bool realizable(const TriangleGeom& g);

enum class Strategy { rng, nssg, tbsg };

/// How the query radius is chosen for each candidate edge s -> e.
///  dynamic: r = d(s, e).
///  fixed:   r = per-node value, typically the distance to s's nearest neighbor.
enum class RadiusMode { dynamic, fixed };

struct StrategyParams {
  Strategy strategy = Strategy::tbsg;
  double mp = 0.53;              // TBSG min_prob threshold, >= 0.5
  double alpha_t_degrees = 60.0;  // NSSG angle threshold, in (0, 60]
  std::size_t m = 50;            // out-degree cap
  RadiusMode r_mode = RadiusMode::dynamic;
  std::span<const double> fixed_r;  // indexed by node id; required when r_mode == fixed

  void validate() const;
};

/// Prunes `candidates` for node s according to the chosen strategy.
///
/// Candidates are canonicalized first: sorted by (distance, id), deduplicated,
/// with s and exact duplicates of s dropped. They are then scanned in order;
/// the scan stops once m neighbors are kept. A candidate e is rejected when an
/// already kept neighbor v satisfies the strategy's rule:
///   rng:  d(v, e) < d(s, e)
///   nssg: angle(v, s, e) <= alpha_t
///   tbsg: d(v, e) < d(s, e) and min_prob(d_se, d_sv, d_ve, r) >= mp
/// Candidate distances are taken from the dataset; the sq_dist field of the
/// input is ignored.
std::vector<Neighbor> select_neighbors(PointId s, std::span<const Neighbor> candidates, const StrategyParams& params,
                                       const Dataset& dataset);

}  // namespace tbsg
