#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cwsplit/error.hpp"
#include "cwsplit/integrator.hpp"
#include "cwsplit/rk45.hpp"
#include "cwsplit/scheme.hpp"
#include "cwsplit/scheme_io.hpp"
#include "cwsplit/systems.hpp"

namespace cwsplit {

struct BenchmarkRecord {
  std::string system;
  std::string scheme;
  long long n = 0;
  long long factor_count = 0;
  double rmse = 0.0;
  double wall_time_s = 0.0;
  int repeats = 0;
  // Non-empty when the run failed; rmse and wall_time_s are NaN then.
  std::string error;

  friend bool operator==(const BenchmarkRecord&, const BenchmarkRecord&) = default;
};

/// Root mean square of the Euclidean state error over a shared grid.
inline double rmse(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size() || a.states.size() != b.states.size() ||
      a.times.size() != a.states.size()) {
    throw Error(ErrorKind::grid_mismatch, "trajectories have different lengths");
  }
  if (a.times.empty()) throw Error(ErrorKind::grid_mismatch, "empty trajectories");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.times.size(); ++j) {
    const double scale = std::max({std::abs(a.times[j]), std::abs(b.times[j]), 1e-300});
    if (std::abs(a.times[j] - b.times[j]) > 1e-12 * scale) {
      throw Error(ErrorKind::grid_mismatch, "grid times differ at index " + std::to_string(j));
    }
    if (a.states[j].size() != b.states[j].size()) {
      throw Error(ErrorKind::grid_mismatch, "state dimensions differ at index " + std::to_string(j));
    }
    for (std::size_t i = 0; i < a.states[j].size(); ++i) {
      const double d = a.states[j][i] - b.states[j][i];
      sum += d * d;
    }
  }
  return std::sqrt(sum / static_cast<double>(a.times.size()));
}

/// Output grid t_j = j T / n, j = 1..n, computed as j * (T / n) like the integrator.
inline std::vector<double> uniform_grid(double horizon, long long n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double h = horizon / static_cast<double>(n);
  for (long long j = 1; j <= n; ++j) g[static_cast<std::size_t>(j - 1)] = static_cast<double>(j) * h;
  return g;
}

/// Reference trajectory on the uniform grid of n points.
inline Trajectory reference_solution(const SystemSpec& sys, double horizon, long long n, const RealState& u0,
                                     const RKOptions& opts = {}) {
  const std::vector<double> grid = uniform_grid(horizon, n);
  return rk45_solve(sys, horizon, grid, u0, opts);
}

struct BenchOptions {
  int repeats = 5;
  // One untimed run before the timed repeats.
  bool warm_up = true;
  RKOptions reference;
  IntegratorOptions integrator;
};

/// For each n the reference is solved once; each scheme is then integrated
/// `repeats` times and the median integration wall time is recorded.
inline std::vector<BenchmarkRecord> run_benchmark(const SystemSpec& sys, const std::vector<Scheme>& schemes,
                                                  std::vector<long long> n_values, double horizon,
                                                  const RealState& u0, const BenchOptions& opts = {}) {
  if (opts.repeats < 1) throw Error(ErrorKind::invalid_argument, "repeats must be >= 1");
  std::vector<BenchmarkRecord> records;
  if (schemes.empty()) return records;
  std::sort(n_values.begin(), n_values.end());

  std::vector<Trajectory> references;
  references.reserve(n_values.size());
  for (long long n : n_values) references.push_back(reference_solution(sys, horizon, n, u0, opts.reference));

  using Clock = std::chrono::steady_clock;
  for (const Scheme& scheme : schemes) {
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      BenchmarkRecord rec;
      rec.system = sys.name;
      rec.scheme = scheme.label;
      rec.n = n_values[k];
      rec.factor_count = static_cast<long long>(scheme.size());
      rec.repeats = opts.repeats;
      try {
        Trajectory traj;
        if (opts.warm_up) traj = integrate(sys, scheme, horizon, rec.n, u0, opts.integrator);
        std::vector<double> times;
        for (int r = 0; r < opts.repeats; ++r) {
          const auto start = Clock::now();
          traj = integrate(sys, scheme, horizon, rec.n, u0, opts.integrator);
          times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
        }
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        rec.wall_time_s = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
        rec.wall_time_s = std::max(rec.wall_time_s, 1e-9);
        rec.rmse = rmse(traj, references[k]);
      } catch (const Error& e) {
        rec.rmse = std::nan("");
        rec.wall_time_s = std::nan("");
        rec.error = e.what();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

inline constexpr const char* kCsvHeader = "system,scheme,n,factor_count,rmse,wall_time_s,repeats";

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Stable order: system, then scheme in first-appearance order, then n ascending.
inline void sort_records(std::vector<BenchmarkRecord>& records) {
  std::map<std::string, std::size_t> scheme_rank;
  for (const BenchmarkRecord& r : records) scheme_rank.try_emplace(r.scheme, scheme_rank.size());
  std::stable_sort(records.begin(), records.end(), [&](const BenchmarkRecord& a, const BenchmarkRecord& b) {
    if (a.system != b.system) return a.system < b.system;
    if (a.scheme != b.scheme) return scheme_rank[a.scheme] < scheme_rank[b.scheme];
    return a.n < b.n;
  });
}

inline void emit_csv(std::vector<BenchmarkRecord> records, std::ostream& os) {
  sort_records(records);
  os << kCsvHeader << '\n';
  for (const BenchmarkRecord& r : records) {
    os << r.system << ',' << r.scheme << ',' << r.n << ',' << r.factor_count << ',' << detail::format_g17(r.rmse)
       << ',' << detail::format_g17(r.wall_time_s) << ',' << r.repeats << '\n';
  }
  if (!os) throw Error(ErrorKind::io, "failed writing benchmark CSV");
}

inline void emit_csv(const std::vector<BenchmarkRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  emit_csv(records, out);
}

inline std::vector<BenchmarkRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw Error(ErrorKind::io, "missing benchmark CSV header");
  std::vector<BenchmarkRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw Error(ErrorKind::io, "benchmark CSV row has " + std::to_string(fields.size()) + " fields");
    try {
      BenchmarkRecord r;
      r.system = fields[0];
      r.scheme = fields[1];
      r.n = std::stoll(fields[2]);
      r.factor_count = std::stoll(fields[3]);
      r.rmse = std::stod(fields[4]);
      r.wall_time_s = std::stod(fields[5]);
      r.repeats = std::stoi(fields[6]);
      records.push_back(std::move(r));
    } catch (const std::exception&) {
      throw Error(ErrorKind::io, "malformed benchmark CSV row: " + line);
    }
  }
  return records;
}

// Experiment table presets: system, scheme names, step counts.
struct TablePreset {
  std::string system;
  std::vector<std::string> schemes;
  std::vector<long long> n_values;
};

inline TablePreset table_preset(int table) {
  const std::vector<std::string> two_dim{"lie-trotter", "strang", "3rd", "6th", "8th", "10th", "12th", "14th"};
  switch (table) {
    case 2: return {"lotka-volterra", two_dim, {100, 1000, 10000}};
    case 3: return {"van-der-pol", two_dim, {125, 500, 1000}};
    case 4: return {"lorenz", {"lie-trotter", "strang", "3rd", "6th"}, {1000, 20000, 100000}};
    default: throw Error(ErrorKind::invalid_argument, "no preset for table " + std::to_string(table));
  }
}

}  // namespace cwsplit
