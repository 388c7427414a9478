// tbsg: build, query and evaluate TBSG indexes from the command line.
//
// Exit codes: 0 success, 1 data/format/IO error (or a failed check), 2 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbsg/bench.hpp"
#include "tbsg/index.hpp"
#include "tbsg/io.hpp"

#ifdef TBSG_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

using namespace tbsg;

struct BuildFlags {
  std::string profile = "default";
  std::size_t k = 0, m = 0, iterations = 0;
  double mp = 0.0, base = 0.0, sample_rate = 0.0;
  std::string r_mode = "dynamic";
  std::uint64_t seed = 0;
  std::string repair = "search";
  CLI::Option *k_opt = nullptr, *m_opt = nullptr, *mp_opt = nullptr, *it_opt = nullptr, *base_opt = nullptr,
              *rate_opt = nullptr, *seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--profile", profile, "Parameter preset")
        ->check(CLI::IsMember({"default", "sift", "gist"}))
        ->capture_default_str();
    k_opt = cmd->add_option("--K", k, "KNNG neighbors per node")->check(CLI::PositiveNumber);
    m_opt = cmd->add_option("--m", m, "Maximum out-degree")->check(CLI::PositiveNumber);
    mp_opt = cmd->add_option("--mp", mp, "min_prob threshold (>= 0.5)");
    it_opt = cmd->add_option("--iterations", iterations, "NN-descent rounds")->check(CLI::PositiveNumber);
    rate_opt = cmd->add_option("--sample-rate", sample_rate, "NN-descent sampling fraction in (0, 1]");
    base_opt = cmd->add_option("--base", base, "Cover tree radius ratio (> 1)");
    cmd->add_option("--r-mode", r_mode, "Query radius per edge: dynamic or static")
        ->check(CLI::IsMember({"dynamic", "static"}))
        ->capture_default_str();
    seed_opt = cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--repair", repair, "Relink unreachable nodes: search, tree or none")
        ->check(CLI::IsMember({"search", "tree", "none"}))
        ->capture_default_str();
  }

  BuildParams resolve() const {
    BuildParams p = profile == "sift" ? sift_profile() : profile == "gist" ? gist_profile() : BuildParams{};
    if (k_opt->count()) p.k = k;
    if (m_opt->count()) p.m = m;
    if (mp_opt->count()) p.mp = mp;
    if (it_opt->count()) p.iterations = iterations;
    if (rate_opt->count()) p.sample_rate = sample_rate;
    if (base_opt->count()) p.base = base;
    if (seed_opt->count()) p.seed = seed;
    p.r_mode = r_mode == "static" ? RadiusMode::fixed : RadiusMode::dynamic;
    p.repair = repair == "none" ? Repair::none : repair == "tree" ? Repair::tree : Repair::search;
    if (!(p.mp >= 0.5)) throw UsageError("--mp must be >= 0.5");
    if (!(p.sample_rate > 0.0 && p.sample_rate <= 1.0)) throw UsageError("--sample-rate must be in (0, 1]");
    if (!(p.base > 1.0)) throw UsageError("--base must be > 1");
    return p;
  }
};

void set_threads(int threads) {
#ifdef TBSG_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed on " + path);
}

GroundTruth load_or_compute_gt(const std::string& gt_path, const Dataset& base, const Dataset& queries,
                               std::size_t k) {
  if (gt_path.empty()) {
    std::fprintf(stderr, "no --gt given; computing brute-force groundtruth (k=%zu)\n", k);
    return brute_force_groundtruth(base, queries, k);
  }
  GroundTruth gt = read_groundtruth(gt_path, base.size());
  if (gt.query_count() != queries.size()) {
    throw UsageError("groundtruth has " + std::to_string(gt.query_count()) + " rows for " +
                     std::to_string(queries.size()) + " queries");
  }
  return gt;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TBSG approximate nearest neighbor index tools"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for parallel kernels (default: all)")->check(CLI::NonNegativeNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Write Gaussian-blob vectors as fvecs");
  std::size_t syn_n = 10000, syn_nq = 0, syn_d = 16, syn_clusters = 4;
  double syn_spread = 0.5;
  std::uint64_t syn_seed = 1;
  std::string syn_out, syn_qout;
  synth->add_option("--n", syn_n, "Base vectors")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--nq", syn_nq, "Query vectors drawn from the same clusters")->capture_default_str();
  synth->add_option("--d", syn_d, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--clusters", syn_clusters, "Cluster count")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--spread", syn_spread, "Per-coordinate cluster std")->capture_default_str();
  synth->add_option("--seed", syn_seed, "Random seed")->capture_default_str();
  synth->add_option("--out", syn_out, "Base fvecs path")->required();
  synth->add_option("--queries-out", syn_qout, "Query fvecs path (needed with --nq)");

  // groundtruth
  auto* gtcmd = app.add_subcommand("groundtruth", "Exact top-k neighbors by brute force, written as ivecs");
  std::string gt_data, gt_queries, gt_out;
  std::size_t gt_k = 100;
  gtcmd->add_option("--data", gt_data, "Base fvecs")->required();
  gtcmd->add_option("--queries", gt_queries, "Query fvecs")->required();
  gtcmd->add_option("--k", gt_k, "Neighbors per query")->check(CLI::PositiveNumber)->capture_default_str();
  gtcmd->add_option("--out", gt_out, "Output ivecs")->required();

  // build
  auto* build = app.add_subcommand("build", "Build an index and save it");
  std::string b_data, b_out;
  BuildFlags b_flags;
  build->add_option("--data", b_data, "Base fvecs")->required();
  build->add_option("--out", b_out, "Index output path")->required();
  b_flags.attach(build);

  // search
  auto* search = app.add_subcommand("search", "Benchmark recall, QPS and distance evaluations");
  std::string s_index, s_data, s_queries, s_gt, s_csv, s_gnuplot, s_name;
  std::size_t s_k = 10, s_reps = 3;
  std::vector<std::size_t> s_pools{10, 20, 50, 100, 200};
  search->add_option("--index", s_index, "Index file")->required();
  search->add_option("--data", s_data, "Base fvecs the index was built on")->required();
  search->add_option("--queries", s_queries, "Query fvecs")->required();
  search->add_option("--gt", s_gt, "Groundtruth ivecs (computed when omitted)");
  search->add_option("--k", s_k, "Neighbors per query")->check(CLI::PositiveNumber)->capture_default_str();
  search->add_option("--pool-sizes", s_pools, "Comma-separated pool sizes l")->delimiter(',')->capture_default_str();
  search->add_option("--repetitions", s_reps, "Timing repetitions (median QPS)")->capture_default_str();
  search->add_option("--name", s_name, "Dataset label for the report");
  search->add_option("--csv", s_csv, "Write the report as CSV");
  search->add_option("--gnuplot", s_gnuplot, "Write gnuplot-ready columns");

  // scale
  auto* scale = app.add_subcommand("scale", "Build and search on growing prefixes; fit growth exponents");
  std::string sc_data, sc_queries, sc_csv;
  std::vector<std::size_t> sc_sizes;
  std::size_t sc_nq = 100, sc_pool = 100, sc_k = 10;
  BuildFlags sc_flags;
  scale->add_option("--data", sc_data, "Base fvecs")->required();
  scale->add_option("--sizes", sc_sizes, "Comma-separated ascending prefix sizes")->delimiter(',')->required();
  scale->add_option("--queries", sc_queries, "Query fvecs (default: hold out the last --nq base vectors)");
  scale->add_option("--nq", sc_nq, "Held-out query count when --queries is absent")->capture_default_str();
  scale->add_option("--pool-size", sc_pool, "Search pool size l")->capture_default_str();
  scale->add_option("--k", sc_k, "Neighbors per query")->capture_default_str();
  scale->add_option("--csv", sc_csv, "Write the table as CSV");
  sc_flags.attach(scale);

  // prob-check
  auto* prob = app.add_subcommand("prob-check", "Compare min_prob with Monte Carlo estimates");
  std::vector<std::size_t> pc_dims{2, 3, 4};
  std::size_t pc_samples = 100000;
  std::uint64_t pc_seed = 1;
  std::string pc_csv;
  prob->add_option("--dims", pc_dims, "Comma-separated dimensions (>= 2)")->delimiter(',')->capture_default_str();
  prob->add_option("--samples", pc_samples, "Monte Carlo samples per cell")->capture_default_str();
  prob->add_option("--seed", pc_seed, "Random seed")->capture_default_str();
  prob->add_option("--csv", pc_csv, "Write rows as CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Rebuild the pruned graph for several mp values");
  std::string sw_data, sw_queries, sw_gt, sw_csv;
  std::vector<double> sw_mps{0.50, 0.51, 0.52, 0.53, 0.54};
  std::size_t sw_k = 10, sw_pool = 100;
  BuildFlags sw_flags;
  sweep->add_option("--data", sw_data, "Base fvecs")->required();
  sweep->add_option("--queries", sw_queries, "Query fvecs")->required();
  sweep->add_option("--gt", sw_gt, "Groundtruth ivecs (computed when omitted)");
  sweep->add_option("--mps", sw_mps, "Comma-separated mp values")->delimiter(',')->capture_default_str();
  sweep->add_option("--k", sw_k, "Neighbors per query")->capture_default_str();
  sweep->add_option("--pool-size", sw_pool, "Search pool size l")->capture_default_str();
  sweep->add_option("--csv", sw_csv, "Write rows as CSV");
  sw_flags.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_threads(threads);

    if (*synth) {
      if (syn_nq > 0 && syn_qout.empty()) throw UsageError("--nq needs --queries-out");
      const Dataset all = generate_synthetic(syn_n + syn_nq, syn_d, syn_clusters, syn_spread, syn_seed);
      write_fvecs(syn_out, all.slice(0, syn_n));
      if (syn_nq > 0) write_fvecs(syn_qout, all.slice(syn_n, syn_n + syn_nq));
      std::printf("wrote %zu base vectors (d=%zu) to %s", syn_n, syn_d, syn_out.c_str());
      if (syn_nq > 0) std::printf(" and %zu queries to %s", syn_nq, syn_qout.c_str());
      std::printf("\n");
    } else if (*gtcmd) {
      const Dataset base = read_fvecs(gt_data);
      const Dataset queries = read_fvecs(gt_queries);
      const auto start = std::chrono::steady_clock::now();
      const GroundTruth gt = brute_force_groundtruth(base, queries, gt_k);
      write_groundtruth(gt_out, gt);
      std::printf("groundtruth: %zu queries x k=%zu in %.2fs -> %s\n", gt.query_count(), gt_k, elapsed(start),
                  gt_out.c_str());
    } else if (*build) {
      const BuildParams params = b_flags.resolve();
      const Dataset base = read_fvecs(b_data);
      const auto start = std::chrono::steady_clock::now();
      const TbsgIndex index = build_tbsg(base, params);
      const double secs = elapsed(start);
      save_index(index, b_out);
      std::printf("built index over %zu points (d=%zu) in %.2fs\n", base.size(), base.dim(), secs);
      std::printf("  params:          %s\n", describe(params).c_str());
      std::printf("  max out-degree:  %zu\n  mean out-degree: %.2f\n", index.max_out_degree(),
                  index.mean_out_degree());
      std::printf("  reachable:       %.4f\n  repaired edges:  %zu\n", reachable_fraction(index),
                  index.repaired_edges);
      std::printf("  saved to %s (%ju bytes)\n", b_out.c_str(),
                  static_cast<std::uintmax_t>(std::filesystem::file_size(b_out)));
    } else if (*search) {
      const TbsgIndex index = load_index(s_index);
      const Dataset base = read_fvecs(s_data);
      const Dataset queries = read_fvecs(s_queries);
      if (index.n != base.size()) throw UsageError("index and --data sizes differ");
      const GroundTruth gt = load_or_compute_gt(s_gt, base, queries, s_k);
      BenchmarkOptions options;
      options.dataset_name = s_name.empty() ? stem(s_data) : s_name;
      options.repetitions = s_reps;
      const BenchmarkReport report = run_benchmark(index, base, queries, gt, s_k, s_pools, options);
      std::cout << format_table(report);
      if (!s_csv.empty()) write_text(s_csv, to_csv(report));
      if (!s_gnuplot.empty()) write_text(s_gnuplot, to_gnuplot(report));
    } else if (*scale) {
      const BuildParams params = sc_flags.resolve();
      const Dataset data = read_fvecs(sc_data);
      Dataset base = data, queries;
      if (!sc_queries.empty()) {
        queries = read_fvecs(sc_queries);
      } else {
        if (sc_nq == 0 || sc_nq >= data.size()) throw UsageError("--nq must be in [1, data size)");
        base = data.slice(0, data.size() - sc_nq);
        queries = data.slice(data.size() - sc_nq, data.size());
      }
      const auto table = scaling_experiment(base, queries, sc_sizes, params, {sc_pool, sc_k});
      std::printf("%10s %12s %14s %8s\n", "n", "build_s", "dist_evals", "recall");
      std::string csv = "n,build_seconds,mean_distance_evals,recall\n";
      for (const auto& r : table.rows) {
        std::printf("%10zu %12.3f %14.1f %8.4f\n", r.n, r.build_seconds, r.mean_distance_evals, r.recall);
        char line[128];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", r.n, r.build_seconds, r.mean_distance_evals,
                      r.recall);
        csv += line;
      }
      if (table.fit) {
        std::printf("build time slope (log t vs log n):            %.3f\n", table.fit->build_time_slope);
        std::printf("distance eval slope (log evals vs log log n): %.3f\n", table.fit->evals_slope);
        std::printf("distance eval ratio largest/smallest:         %.3f\n", table.fit->evals_ratio);
      } else {
        std::printf("fewer than 3 sizes: no fit\n");
      }
      if (!sc_csv.empty()) write_text(sc_csv, csv);
    } else if (*prob) {
      if (pc_samples < 10000) std::fprintf(stderr, "warning: fewer than 10^4 samples per cell\n");
      const ProbGrid grid;
      const auto result = prob_check(grid, pc_dims, pc_samples, pc_seed);
      for (const auto& g : result.skipped) {
        std::printf("skipped d_se=%g d_sv=%g d_ve=%g r=%g (unrealizable or d_ve > d_se)\n", g.d_se, g.d_sv, g.d_ve,
                    g.r);
      }
      std::printf("%6s %6s %6s %5s %4s %9s %9s %9s %9s %6s\n", "d_sv", "d_ve", "r", "dim", "", "min_prob", "estimate",
                  "std_err", "analytic", "bound");
      std::string csv = "d_se,d_sv,d_ve,r,dim,min_prob,estimate,std_error,analytic,bound_ok,analytic_ok\n";
      std::size_t failures = 0;
      for (const auto& row : result.rows) {
        const bool ok = row.bound_ok && row.analytic_ok;
        failures += !ok;
        std::printf("%6.2f %6.2f %6.2f %5zu %4s %9.5f %9.5f %9.5f %9s %6s\n", row.geom.d_sv, row.geom.d_ve,
                    row.geom.r, row.dim, "", row.min_prob, row.estimate, row.std_error,
                    row.analytic ? std::to_string(*row.analytic).substr(0, 7).c_str() : "-", ok ? "ok" : "FAIL");
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%zu,%.17g,%.17g,%.17g,%s,%d,%d\n", row.geom.d_se,
                      row.geom.d_sv, row.geom.d_ve, row.geom.r, row.dim, row.min_prob, row.estimate, row.std_error,
                      row.analytic ? std::to_string(*row.analytic).c_str() : "", row.bound_ok, row.analytic_ok);
        csv += line;
      }
      if (!pc_csv.empty()) write_text(pc_csv, csv);
      if (failures > 0) {
        std::printf("%zu of %zu rows failed\n", failures, result.rows.size());
        return 1;
      }
      std::printf("all bounds hold (%zu rows)\n", result.rows.size());
    } else if (*sweep) {
      const BuildParams params = sw_flags.resolve();
      const Dataset base = read_fvecs(sw_data);
      const Dataset queries = read_fvecs(sw_queries);
      const GroundTruth gt = load_or_compute_gt(sw_gt, base, queries, sw_k);
      const auto rows = mp_sweep(base, queries, gt, params, sw_mps, sw_k, sw_pool);
      std::printf("%8s %10s %10s %12s %14s\n", "mp", "mean_deg", "recall", "QPS", "dist_evals");
      std::string csv = "mp,mean_out_degree,pool_size,recall,qps,mean_distance_evals\n";
      for (const auto& r : rows) {
        std::printf("%8.4f %10.2f %10.4f %12.1f %14.1f\n", r.mp, r.mean_out_degree, r.result.recall, r.result.qps,
                    r.result.mean_distance_evals);
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%zu,%.17g,%.17g,%.17g\n", r.mp, r.mean_out_degree,
                      r.result.pool_size, r.result.recall, r.result.qps, r.result.mean_distance_evals);
        csv += line;
      }
      if (!sw_csv.empty()) write_text(sw_csv, csv);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
