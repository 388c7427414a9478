#include "tbsg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "tbsg/random.hpp"
#include "tbsg/reference.hpp"
#include "topk.hpp"

namespace tbsg {

GroundTruth brute_force_groundtruth(const Dataset& dataset, const Dataset& queries, std::size_t k, Execution exec) {
  if (k == 0) throw UsageError("groundtruth k must be >= 1");
  if (k > dataset.size()) {
    throw UsageError("groundtruth k (" + std::to_string(k) + ") exceeds dataset size " + std::to_string(dataset.size()));
  }
  if (!queries.empty() && queries.dim() != dataset.dim()) throw UsageError("query and base dimensions differ");
  GroundTruth gt;
  gt.k = k;
  if (exec == Execution::serial) {
    gt.ids = reference::topk_ids(dataset, queries, k);
    return gt;
  }
  gt.ids.resize(queries.size());
  const auto count = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t q = 0; q < count; ++q) {
    const auto best = detail::topk_scan(dataset, queries.row(static_cast<PointId>(q)), k, dataset.size());
    auto& ids = gt.ids[static_cast<std::size_t>(q)];
    ids.reserve(k);
    for (const auto& nb : best) ids.push_back(nb.id);
  }
  return gt;
}

double recall(const std::vector<std::vector<PointId>>& results, const GroundTruth& gt) {
  if (results.size() != gt.query_count()) {
    throw UsageError("recall: " + std::to_string(results.size()) + " result lists for " +
                     std::to_string(gt.query_count()) + " groundtruth queries");
  }
  if (gt.query_count() == 0) return 1.0;
  double total = 0.0;
  std::vector<PointId> r, g;
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (gt.ids[q].size() != gt.k) throw UsageError("recall: groundtruth row has wrong length");
    r.assign(results[q].begin(), results[q].begin() + static_cast<std::ptrdiff_t>(std::min(gt.k, results[q].size())));
    g = gt.ids[q];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    std::sort(g.begin(), g.end());
    std::size_t hits = 0;
    for (std::size_t i = 0, j = 0; i < r.size() && j < g.size();) {
      if (r[i] < g[j]) {
        ++i;
      } else if (g[j] < r[i]) {
        ++j;
      } else {
        ++hits;
        ++i;
        ++j;
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(gt.k);
  }
  return total / static_cast<double>(results.size());
}

BenchmarkReport run_benchmark(const TbsgIndex& index, const Dataset& dataset, const Dataset& queries,
                              const GroundTruth& gt, std::size_t k, std::vector<std::size_t> pool_sizes,
                              const BenchmarkOptions& options) {
  if (gt.query_count() != queries.size()) throw UsageError("groundtruth and query counts differ");
  if (k == 0 || k > gt.k) throw UsageError("k must be in [1, groundtruth k]");
  if (pool_sizes.empty()) throw UsageError("at least one pool size is required");
  for (auto l : pool_sizes) {
    if (l < k) throw UsageError("pool size " + std::to_string(l) + " is smaller than k " + std::to_string(k));
  }
  std::sort(pool_sizes.begin(), pool_sizes.end());

  // Recall against the top-k slice of a possibly deeper groundtruth.
  GroundTruth truth = gt;
  truth.k = k;
  for (auto& ids : truth.ids) ids.resize(k);

  BenchmarkReport report;
  report.dataset = options.dataset_name;
  report.index_params = index.build_params ? describe(*index.build_params) : "loaded m=" + std::to_string(index.m);
  report.k = k;

  Searcher searcher(index, dataset);
  const std::size_t reps = std::max<std::size_t>(1, options.repetitions);
  for (auto l : pool_sizes) {
    const SearchParams sp{l, k};
    std::vector<std::vector<PointId>> results(queries.size());
    std::size_t evals = 0;
    std::vector<double> seconds;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      for (PointId q = 0; q < queries.size(); ++q) {
        auto res = searcher.search(queries.row(q), sp);
        if (rep == 0) {
          evals += res.distance_evals;
          results[q] = std::move(res.ids);
        }
      }
      seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(seconds.begin(), seconds.end());
    const double median = seconds[seconds.size() / 2];
    BenchmarkRow row;
    row.pool_size = l;
    row.recall = recall(results, truth);
    row.qps = static_cast<double>(queries.size()) / std::max(median, 1e-9);
    row.mean_distance_evals = queries.empty() ? 0.0 : static_cast<double>(evals) / static_cast<double>(queries.size());
    report.rows.push_back(row);
  }
  return report;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_slope needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw UsageError("fit_slope: x values are all equal");
  return (n * sxy - sx * sy) / denom;
}

ScalingTable scaling_experiment(const Dataset& dataset, const Dataset& queries, const std::vector<std::size_t>& sizes,
                                const BuildParams& build, const SearchParams& search, Execution exec) {
  if (sizes.empty()) throw UsageError("scaling experiment needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || sizes[i] > dataset.size()) throw UsageError("scaling size out of range");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw UsageError("scaling sizes must be strictly ascending");
  }
  search.validate();

  ScalingTable table;
  for (auto n : sizes) {
    const Dataset prefix = dataset.slice(0, n);
    const auto start = std::chrono::steady_clock::now();
    const TbsgIndex index = build_tbsg(prefix, build, exec);
    const double build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::size_t k = std::min(search.k, n);
    const GroundTruth gt = brute_force_groundtruth(prefix, queries, k, exec);
    Searcher searcher(index, prefix);
    std::vector<std::vector<PointId>> results(queries.size());
    std::size_t evals = 0;
    for (PointId q = 0; q < queries.size(); ++q) {
      auto res = searcher.search(queries.row(q), {search.l, k});
      evals += res.distance_evals;
      results[q] = std::move(res.ids);
    }
    ScalingRow row;
    row.n = n;
    row.build_seconds = build_seconds;
    row.mean_distance_evals = queries.empty() ? 0.0 : static_cast<double>(evals) / static_cast<double>(queries.size());
    row.recall = recall(results, gt);
    table.rows.push_back(row);
  }

  if (table.rows.size() >= 3) {
    std::vector<double> log_n, log_log_n, log_t, log_e;
    for (const auto& r : table.rows) {
      log_n.push_back(std::log(static_cast<double>(r.n)));
      log_log_n.push_back(std::log(std::log(static_cast<double>(r.n))));
      log_t.push_back(std::log(std::max(r.build_seconds, 1e-9)));
      log_e.push_back(std::log(std::max(r.mean_distance_evals, 1e-9)));
    }
    ScalingFit fit;
    fit.build_time_slope = fit_slope(log_n, log_t);
    fit.evals_slope = fit_slope(log_log_n, log_e);
    fit.evals_ratio = table.rows.back().mean_distance_evals / std::max(table.rows.front().mean_distance_evals, 1e-9);
    table.fit = fit;
  }
  return table;
}

ProbCheckResult prob_check(const ProbGrid& grid, const std::vector<std::size_t>& dims, std::size_t samples,
                           std::uint64_t seed) {
  if (dims.empty()) throw UsageError("prob_check needs at least one dimension");
  for (auto d : dims) {
    if (d < 2) throw UsageError("prob_check dimensions must be >= 2");
  }
  if (samples == 0) throw UsageError("prob_check needs samples >= 1");

  ProbCheckResult out;
  std::uint64_t cell = 0;
  for (double sv : grid.d_sv) {
    for (double ve : grid.d_ve) {
      for (double r : grid.radius) {
        const TriangleGeom g{grid.d_se, sv, ve, r};
        if (!realizable(g) || !(r > 0.0) || ve > grid.d_se) {
          out.skipped.push_back(g);
          continue;
        }
        ++cell;
        const double bound = min_prob(g);
        for (auto dim : dims) {
          const auto mc = monte_carlo_prob(g, dim, samples, mix_seed(seed, cell, dim));
          ProbRow row;
          row.geom = g;
          row.dim = dim;
          row.min_prob = bound;
          row.estimate = mc.estimate;
          row.std_error = mc.std_error;
          row.bound_ok = mc.estimate + 4.0 * mc.std_error >= bound;
          if (dim == 2) {
            const double exact = disk_prob(g);
            const double se_exact = std::sqrt(exact * (1.0 - exact) / static_cast<double>(samples));
            row.analytic = exact;
            row.analytic_ok = std::abs(mc.estimate - exact) <= 4.0 * std::max(mc.std_error, se_exact);
          }
          out.rows.push_back(row);
        }
      }
    }
  }
  return out;
}

std::vector<SweepRow> mp_sweep(const Dataset& dataset, const Dataset& queries, const GroundTruth& gt,
                               const BuildParams& build, const std::vector<double>& mps, std::size_t k,
                               std::size_t pool_size, Execution exec) {
  const BuildArtifacts artifacts = prepare_build(dataset, build, exec);
  std::vector<SweepRow> rows;
  for (double mp : mps) {
    BuildParams params = build;
    params.mp = mp;
    const TbsgIndex index = assemble_index(dataset, artifacts, params, exec);
    const auto report = run_benchmark(index, dataset, queries, gt, k, {pool_size});
    rows.push_back({mp, index.mean_out_degree(), report.rows.front()});
  }
  return rows;
}

}  // namespace tbsg
