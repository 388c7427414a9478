#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tbsg/bench.hpp"

namespace tbsg {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int precision) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

double parse_double(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || *end != '\0') throw FormatError("bad number '" + field + "' on line " + std::to_string(line), 0);
  return v;
}

std::size_t parse_size(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (field.empty() || *end != '\0') throw FormatError("bad integer '" + field + "' on line " + std::to_string(line), 0);
  return static_cast<std::size_t>(v);
}

constexpr const char* kHeader = "pool_size,recall,qps,mean_distance_evals";

}  // namespace

std::string describe(const BuildParams& p) {
  std::ostringstream out;
  char mp[32];
  std::snprintf(mp, sizeof mp, "%g", p.mp);
  out << "K=" << p.k << " m=" << p.m << " mp=" << mp
      << " r=" << (p.r_mode == RadiusMode::dynamic ? "dynamic" : "static") << " base=" << p.base
      << " iterations=" << p.iterations << " sample_rate=" << p.sample_rate << " seed=" << p.seed;
  if (p.repair == Repair::none) out << " repair=none";
  if (p.repair == Repair::tree) out << " repair=tree";
  return out.str();
}

std::string to_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "# dataset=" << one_line(report.dataset) << '\n';
  out << "# index_params=" << one_line(report.index_params) << '\n';
  out << "# k=" << report.k << '\n';
  out << kHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.pool_size << ',' << num(r.recall) << ',' << num(r.qps) << ',' << num(r.mean_distance_evals) << '\n';
  }
  return out.str();
}

BenchmarkReport parse_benchmark_csv(const std::string& text) {
  BenchmarkReport report;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "dataset") {
        report.dataset = value;
      } else if (key == "index_params") {
        report.index_params = value;
      } else if (key == "k") {
        report.k = parse_size(value, line_no);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) throw FormatError("unexpected CSV header on line " + std::to_string(line_no), 0);
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) throw FormatError("expected 4 CSV fields on line " + std::to_string(line_no), 0);
    BenchmarkRow row;
    row.pool_size = parse_size(fields[0], line_no);
    row.recall = parse_double(fields[1], line_no);
    row.qps = parse_double(fields[2], line_no);
    row.mean_distance_evals = parse_double(fields[3], line_no);
    report.rows.push_back(row);
  }
  if (!header_seen) throw FormatError("missing CSV header", 0);
  return report;
}

std::string to_gnuplot(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "# " << one_line(report.dataset) << " k=" << report.k << '\n';
  out << "# pool_size recall qps mean_distance_evals\n";
  for (const auto& r : report.rows) {
    out << r.pool_size << ' ' << num(r.recall) << ' ' << num(r.qps) << ' ' << num(r.mean_distance_evals) << '\n';
  }
  return out.str();
}

std::string format_table(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset << "\nindex:   " << report.index_params << "\nk:       " << report.k << "\n\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%10s %10s %14s %14s\n", "pool", "recall", "QPS", "dist evals");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%10zu %10s %14s %14s\n", r.pool_size, fixed(r.recall, 4).c_str(),
                  fixed(r.qps, 1).c_str(), fixed(r.mean_distance_evals, 1).c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace tbsg
