#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbsg/dataset.hpp"
#include "tbsg/edge_selection.hpp"
#include "tbsg/index.hpp"
#include "tbsg/io.hpp"

namespace tbsg {

/// Exact top-k per query by full scan, ties broken by ascending id.
GroundTruth brute_force_groundtruth(const Dataset& dataset, const Dataset& queries, std::size_t k,
                                    Execution exec = Execution::parallel);

/// Mean over queries of |R ∩ G| / |G|. Each result list is truncated to the
/// groundtruth k before intersecting.
double recall(const std::vector<std::vector<PointId>>& results, const GroundTruth& gt);

struct BenchmarkRow {
  std::size_t pool_size = 0;
  double recall = 0.0;
  double qps = 0.0;
  double mean_distance_evals = 0.0;

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

struct BenchmarkReport {
  std::string dataset;
  std::string index_params;
  std::size_t k = 0;
  std::vector<BenchmarkRow> rows;  // ascending pool size

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

struct BenchmarkOptions {
  std::string dataset_name = "unnamed";
  std::size_t repetitions = 3;  // QPS is the median over repetitions
};

/// Runs every query single-threaded for each pool size.
BenchmarkReport run_benchmark(const TbsgIndex& index, const Dataset& dataset, const Dataset& queries,
                              const GroundTruth& gt, std::size_t k, std::vector<std::size_t> pool_sizes,
                              const BenchmarkOptions& options = {});

std::string describe(const BuildParams& params);

// CSV with "# key=value" metadata lines followed by a header row.
std::string to_csv(const BenchmarkReport& report);
BenchmarkReport parse_benchmark_csv(const std::string& text);
/// Whitespace-separated columns with a commented header, for gnuplot.
std::string to_gnuplot(const BenchmarkReport& report);
std::string format_table(const BenchmarkReport& report);

struct ScalingRow {
  std::size_t n = 0;
  double build_seconds = 0.0;
  double mean_distance_evals = 0.0;
  double recall = 0.0;
};

struct ScalingFit {
  double build_time_slope = 0.0;  // d log(build seconds) / d log n
  double evals_slope = 0.0;       // d log(evals) / d log(log n)
  double evals_ratio = 0.0;       // evals(largest) / evals(smallest)
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  std::optional<ScalingFit> fit;  // needs at least three sizes
};

/// Builds on prefixes of `dataset` of each size and searches `queries` with a
/// fixed pool. Sizes must be ascending and no larger than the dataset.
ScalingTable scaling_experiment(const Dataset& dataset, const Dataset& queries, const std::vector<std::size_t>& sizes,
                                const BuildParams& build, const SearchParams& search,
                                Execution exec = Execution::parallel);

/// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ProbGrid {
  std::vector<double> d_sv{0.25, 0.5, 0.75, 1.0, 1.5};
  std::vector<double> d_ve{0.3, 0.6, 0.8, 1.0};
  std::vector<double> radius{0.5, 1.0};
  double d_se = 1.0;
};

struct ProbRow {
  TriangleGeom geom;
  std::size_t dim = 0;
  double min_prob = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  bool bound_ok = false;
  std::optional<double> analytic;  // dim == 2 only
  bool analytic_ok = true;
};

struct ProbCheckResult {
  std::vector<ProbRow> rows;
  std::vector<TriangleGeom> skipped;  // unrealizable or outside d_ve <= d_se
};

/// Compares min_prob against Monte Carlo estimates over a geometry grid.
/// Only geometries with d_ve <= d_se (where pruning can trigger) are checked.
ProbCheckResult prob_check(const ProbGrid& grid, const std::vector<std::size_t>& dims, std::size_t samples,
                           std::uint64_t seed);

struct SweepRow {
  double mp = 0.0;
  double mean_out_degree = 0.0;
  BenchmarkRow result;
};

/// Reuses one cover tree and KNNG while rebuilding the pruned graph per mp.
std::vector<SweepRow> mp_sweep(const Dataset& dataset, const Dataset& queries, const GroundTruth& gt,
                               const BuildParams& build, const std::vector<double>& mps, std::size_t k,
                               std::size_t pool_size, Execution exec = Execution::parallel);

}  // namespace tbsg
