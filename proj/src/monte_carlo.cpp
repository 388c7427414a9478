#include <cmath>

#include "tbsg/edge_selection.hpp"
#include "tbsg/random.hpp"

namespace tbsg {

ProbEstimate monte_carlo_prob(const TriangleGeom& g, std::size_t dim, std::size_t samples, std::uint64_t seed) {
  if (dim < 2) throw UsageError("monte_carlo_prob: dim must be >= 2");
  if (samples == 0) throw UsageError("monte_carlo_prob: samples must be >= 1");
  if (!realizable(g)) throw UsageError("monte_carlo_prob: unrealizable triangle");
  if (!(g.r > 0.0)) throw UsageError("monte_carlo_prob: radius must be positive");

  // s at the origin, v on the x axis, e above it in the (x, y) plane.
  const double vx = g.d_sv;
  const double ex = (g.d_se * g.d_se + g.d_sv * g.d_sv - g.d_ve * g.d_ve) / (2.0 * g.d_sv);
  const double ey = std::sqrt(std::max(0.0, g.d_se * g.d_se - ex * ex));

  Rng rng(seed);
  std::vector<double> dir(dim);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (auto& x : dir) {
        x = rng.normal();
        norm_sq += x * x;
      }
    } while (norm_sq == 0.0);
    const double scale = g.r * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim)) / std::sqrt(norm_sq);
    const double qx = ex + scale * dir[0];
    const double qy = ey + scale * dir[1];
    double tail = 0.0;
    for (std::size_t j = 2; j < dim; ++j) tail += (scale * dir[j]) * (scale * dir[j]);
    const double to_v = (qx - vx) * (qx - vx) + qy * qy + tail;
    const double to_s = qx * qx + qy * qy + tail;
    if (to_v < to_s) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace tbsg
