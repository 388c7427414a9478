#include <cmath>

#include "tbsg/io.hpp"
#include "tbsg/random.hpp"

namespace tbsg {

SyntheticData generate_synthetic_labeled(std::size_t n, std::size_t dim, std::size_t clusters,
                                         double spread, std::uint64_t seed) {
  if (n == 0 || dim == 0 || clusters == 0) throw UsageError("synthetic: n, dim and clusters must be >= 1");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw UsageError("synthetic: spread must be finite and >= 0");

  Rng rng(seed);
  std::vector<double> centers(clusters * dim);
  for (double& c : centers) c = rng.normal();

  SyntheticData out;
  out.labels.resize(n);
  std::vector<float> values(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint32_t>(rng.below(clusters));
    out.labels[i] = label;
    for (std::size_t j = 0; j < dim; ++j) {
      values[i * dim + j] = static_cast<float>(centers[label * dim + j] + spread * rng.normal());
    }
  }
  out.points = Dataset(dim, std::move(values));
  out.centers = Dataset(dim, std::vector<float>(centers.begin(), centers.end()));
  return out;
}

Dataset generate_synthetic(std::size_t n, std::size_t dim, std::size_t clusters, double spread,
                           std::uint64_t seed) {
  return std::move(generate_synthetic_labeled(n, dim, clusters, spread, seed).points);
}

}  // namespace tbsg
