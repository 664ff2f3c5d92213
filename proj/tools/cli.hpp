#pragma once

// Command-line front end: simulate, count, bench, verify-order.
// Exit codes: 0 success, 1 numerical failure, 2 configuration error.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cwsplit/bench.hpp"
#include "cwsplit/error.hpp"
#include "cwsplit/integrator.hpp"
#include "cwsplit/order_verify.hpp"
#include "cwsplit/scheme.hpp"
#include "cwsplit/scheme_io.hpp"
#include "cwsplit/systems.hpp"

namespace cwsplit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::overflow:
    case ErrorKind::non_convergence:
    case ErrorKind::precision_floor:
    case ErrorKind::insufficient_data: return kExitNumerical;
    default: return kExitConfig;
  }
}

struct SimulateConfig {
  std::string system;
  std::vector<std::string> params;
  std::string scheme;
  std::string scheme_file;
  std::optional<double> horizon;
  long long n = 1000;
  std::string u0;
  bool project_real = false;
  long long record_every = 1;
  std::string output;
};

struct CountConfig {
  std::optional<int> n;
  std::optional<std::uint64_t> q;
  bool table = false;
};

struct BenchConfig {
  std::optional<int> table;
  std::string system;
  std::vector<std::string> params;
  std::vector<std::string> schemes;
  std::vector<long long> n_values;
  std::optional<double> horizon;
  std::string u0;
  int repeats = 5;
  std::string output;
};

struct VerifyConfig {
  std::string scheme;
  std::string scheme_file;
  std::string seeds = "0..4";
  int dim = 3;
};

namespace detail {

inline double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v)) {
    throw Error(ErrorKind::invalid_argument, what + ": '" + text + "' is not a finite number");
  }
  return v;
}

inline RealState parse_state(const std::string& text) {
  RealState u;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) u.push_back(parse_double(item, "--u0"));
  if (u.empty()) throw Error(ErrorKind::invalid_argument, "--u0 is empty");
  return u;
}

inline std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::invalid_argument, "--param expects key=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = parse_double(item.substr(eq + 1), "--param " + item.substr(0, eq));
  }
  return out;
}

// "0..4" or "0,2,7".
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto to_u64 = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorKind::invalid_argument, "bad seed list '" + text + "'");
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = to_u64(std::string_view(text).substr(0, dots));
    const std::uint64_t hi = to_u64(std::string_view(text).substr(dots + 2));
    if (hi < lo || hi - lo > 10000) throw Error(ErrorKind::invalid_argument, "bad seed range '" + text + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(to_u64(item));
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "empty seed list");
  return seeds;
}

inline Scheme resolve_scheme(const std::string& name, const std::string& file, int dim) {
  if (!name.empty() && !file.empty()) throw Error(ErrorKind::invalid_argument, "give --scheme or --scheme-file, not both");
  if (!file.empty()) {
    Scheme s = load_scheme_file(file);
    if (s.dim != dim) {
      throw Error(ErrorKind::invalid_dimension, "scheme file has dim " + std::to_string(s.dim) + ", system has dim " +
                                                    std::to_string(dim));
    }
    return s;
  }
  if (name.empty()) throw Error(ErrorKind::invalid_argument, "--scheme or --scheme-file is required");
  return named_scheme(name, dim);
}

class OutputFile {
 public:
  OutputFile(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace detail

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
  os << 't';
  for (std::size_t i = 1; i <= dim; ++i) os << ",u" << i;
  os << '\n';
  char buf[40];
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[j]);
    os << buf;
    for (double v : traj.states[j]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
  if (!os) throw Error(ErrorKind::io, "failed writing trajectory");
}

inline int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
  const SystemSpec sys = make_system(cfg.system, detail::parse_params(cfg.params));
  const Scheme scheme = detail::resolve_scheme(cfg.scheme, cfg.scheme_file, sys.dim);
  const Experiment exp = default_experiment(cfg.system);
  const double horizon = cfg.horizon.value_or(exp.horizon);
  const RealState u0 = cfg.u0.empty() ? exp.initial_state : detail::parse_state(cfg.u0);
  if (u0.size() != static_cast<std::size_t>(sys.dim)) {
    throw Error(ErrorKind::invalid_dimension, "--u0 has " + std::to_string(u0.size()) + " entries, system " +
                                                  sys.name + " has dim " + std::to_string(sys.dim));
  }
  IntegratorOptions opts;
  opts.project_real_each_step = cfg.project_real;
  opts.record_every = cfg.record_every;
  const Trajectory traj = integrate(sys, scheme, horizon, cfg.n, u0, opts);

  detail::OutputFile file(cfg.output, out);
  write_trajectory_csv(traj, file.stream());
  char buf[64];
  std::snprintf(buf, sizeof buf, "max_imag=%.6g", traj.max_imag);
  err << buf << '\n';
  if (traj.imag_warning) err << "warning: imaginary parts exceed the relative threshold\n";
  return kExitOk;
}

// Registered two-operator factor counts per order, for the count table.
struct CountRow {
  const char* base;
  int order;
  std::uint64_t q;
};

inline constexpr CountRow kCountRows[] = {
    {"Lie-Trotter", 1, 2}, {"Strang", 2, 3}, {"3rd order", 3, 5},    {"4th order", 4, 7},      {"6th order", 6, 17},
    {"8th order", 8, 55},  {"10th order", 10, 513}, {"12th order", 12, 2049}, {"14th order", 14, 8193},
};

inline void write_count_table(std::ostream& os) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s %3s", "base", "p");
  os << buf;
  for (int n = 2; n <= 8; ++n) {
    std::snprintf(buf, sizeof buf, " %16s", ("N=" + std::to_string(n)).c_str());
    os << buf;
  }
  os << '\n';
  for (const CountRow& row : kCountRows) {
    std::snprintf(buf, sizeof buf, "%-12s %3d", row.base, row.order);
    os << buf;
    for (int n = 2; n <= 8; ++n) {
      std::string cell;
      if (row.order == 1) {
        cell = std::to_string(n);
      } else {
        try {
          cell = std::to_string(count_factors(n, row.q));
        } catch (const Error&) {
          cell = "-";
        }
      }
      std::snprintf(buf, sizeof buf, " %16s", cell.c_str());
      os << buf;
    }
    os << '\n';
  }
}

inline int cmd_count(const CountConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.table) {
    write_count_table(out);
    return kExitOk;
  }
  if (!cfg.n || !cfg.q) throw Error(ErrorKind::invalid_argument, "count needs --N and --q (or --table)");
  out << count_factors(*cfg.n, *cfg.q) << '\n';
  return kExitOk;
}

inline int cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string system_name = cfg.system;
  std::vector<std::string> scheme_names = cfg.schemes;
  std::vector<long long> n_values = cfg.n_values;
  if (cfg.table) {
    const TablePreset preset = table_preset(*cfg.table);
    if (system_name.empty()) system_name = preset.system;
    if (scheme_names.empty()) scheme_names = preset.schemes;
    if (n_values.empty()) n_values = preset.n_values;
  }
  if (system_name.empty()) throw Error(ErrorKind::invalid_argument, "--system or --table is required");
  if (scheme_names.empty()) throw Error(ErrorKind::invalid_argument, "scheme list is empty");
  if (n_values.empty()) throw Error(ErrorKind::invalid_argument, "--n list is empty");
  for (long long n : n_values) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "step counts must be >= 1");
  }

  const SystemSpec sys = make_system(system_name, detail::parse_params(cfg.params));
  const Experiment exp = default_experiment(system_name);
  const double horizon = cfg.horizon.value_or(exp.horizon);
  const RealState u0 = cfg.u0.empty() ? exp.initial_state : detail::parse_state(cfg.u0);
  if (u0.size() != static_cast<std::size_t>(sys.dim)) throw Error(ErrorKind::invalid_dimension, "--u0 size mismatch");

  std::vector<Scheme> schemes;
  for (const std::string& name : scheme_names) {
    Scheme s = named_scheme(name, sys.dim);
    s.label = name;
    schemes.push_back(std::move(s));
  }
  BenchOptions opts;
  opts.repeats = cfg.repeats;
  const std::vector<BenchmarkRecord> records = run_benchmark(sys, schemes, n_values, horizon, u0, opts);

  detail::OutputFile file(cfg.output, out);
  emit_csv(records, file.stream());
  int status = kExitOk;
  for (const BenchmarkRecord& r : records) {
    if (!r.error.empty()) {
      err << r.scheme << " n=" << r.n << ": " << r.error << '\n';
      status = kExitNumerical;
    }
  }
  return status;
}

inline int cmd_verify_order(const VerifyConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.dim < 2 || cfg.dim > 4) throw Error(ErrorKind::invalid_argument, "--dim must be 2, 3 or 4");
  const std::vector<std::uint64_t> seeds = detail::parse_seeds(cfg.seeds);
  Scheme scheme;
  std::optional<FamilyMember> member;
  if (!cfg.scheme_file.empty()) {
    scheme = detail::resolve_scheme(cfg.scheme, cfg.scheme_file, 2);
  } else if (cfg.scheme.empty()) {
    throw Error(ErrorKind::invalid_argument, "--scheme or --scheme-file is required");
  } else {
    scheme = named_scheme(cfg.scheme, 2);
    member = family_member(cfg.scheme);
  }

  bool all_pass = true;
  char buf[160];
  for (std::uint64_t seed : seeds) {
    const CertificationResult r = certify_order(scheme, seed, member ? member->family : 0, member ? member->k : -1,
                                                static_cast<std::size_t>(cfg.dim));
    std::snprintf(buf, sizeof buf, "%s order=%d seed=%llu slope=%.3f expected=%d+-%.1f%s %s", r.label.c_str(),
                  r.declared_order, static_cast<unsigned long long>(seed), r.slope, r.declared_order + 1,
                  r.tolerance, r.extended ? " (extended)" : "", r.pass ? "PASS" : "FAIL");
    out << buf << '\n';
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitNumerical;
}

/// Parses argv and dispatches; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coordinate-wise operator splitting: simulation, benchmarks, factor counts, order checks", "cwsplit"};
  app.require_subcommand(1);

  SimulateConfig sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Integrate one system with one scheme and write t,u1..uN CSV");
  simulate->add_option("--system", sim.system, "lotka-volterra, van-der-pol or lorenz")->required();
  simulate->add_option("--scheme", sim.scheme, "lie-trotter, strang, 3rd, 4th, 6th, 8th, 10th, 12th, 14th, u<k>, w<k>, z<k>");
  simulate->add_option("--scheme-file", sim.scheme_file, "Scheme text file (coord re im per line)");
  simulate->add_option("--T", sim.horizon, "Final time (default: experiment horizon)")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim.n, "Number of uniform steps")->check(CLI::Range(1LL, 1'000'000'000LL))->capture_default_str();
  simulate->add_option("--u0", sim.u0, "Initial state, comma separated (default: experiment state)");
  simulate->add_option("--param", sim.params, "Parameter override key=value (repeatable)");
  simulate->add_flag("--project-real", sim.project_real, "Drop imaginary parts after every step");
  simulate->add_option("--record-every", sim.record_every, "Output stride")->check(CLI::Range(1LL, 1'000'000'000LL))->capture_default_str();
  simulate->add_option("-o,--output", sim.output, "Output CSV path (default: stdout)");

  CountConfig cnt;
  CLI::App* count = app.add_subcommand("count", "Factor count of the recursive coordinate substitution");
  count->add_option("--N", cnt.n, "Target dimension (>= 2)");
  count->add_option("--q", cnt.q, "Odd two-operator factor count");
  count->add_flag("--table", cnt.table, "Print the full count table for the registered bases");

  BenchConfig bn;
  CLI::App* bench = app.add_subcommand("bench", "RMSE against the RK45 reference and median wall time, as CSV");
  bench->add_option("--table", bn.table, "Preset: 2 (Lotka-Volterra), 3 (Van der Pol), 4 (Lorenz)")->check(CLI::IsMember({2, 3, 4}));
  bench->add_option("--system", bn.system, "System name");
  bench->add_option("--schemes", bn.schemes, "Comma separated scheme names")->delimiter(',');
  bench->add_option("--n", bn.n_values, "Comma separated step counts")->delimiter(',');
  bench->add_option("--T", bn.horizon, "Final time (default: experiment horizon)")->check(CLI::PositiveNumber);
  bench->add_option("--u0", bn.u0, "Initial state, comma separated");
  bench->add_option("--param", bn.params, "Parameter override key=value (repeatable)");
  bench->add_option("--repeats", bn.repeats, "Timed repeats per point")->check(CLI::Range(1, 1000))->capture_default_str();
  bench->add_option("-o,--output", bn.output, "Output CSV path (default: stdout)");

  VerifyConfig vf;
  CLI::App* verify = app.add_subcommand("verify-order", "Certify the local order of a two-operator scheme on random matrices");
  verify->add_option("--scheme", vf.scheme, "Scheme name");
  verify->add_option("--scheme-file", vf.scheme_file, "Two-operator scheme text file");
  verify->add_option("--seeds", vf.seeds, "Seed range lo..hi or comma list")->capture_default_str();
  verify->add_option("--dim", vf.dim, "Matrix size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*count) return cmd_count(cnt, out, err);
    if (*bench) return cmd_bench(bn, out, err);
    if (*verify) return cmd_verify_order(vf, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace cwsplit::cli
