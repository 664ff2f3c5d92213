#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cwsplit/bench.hpp"

using namespace cwsplit;

namespace {

Trajectory make_traj(const std::vector<RealState>& states, double h = 0.5) {
  Trajectory t;
  for (std::size_t j = 0; j < states.size(); ++j) {
    t.times.push_back(static_cast<double>(j + 1) * h);
    t.states.push_back(states[j]);
  }
  return t;
}

BenchmarkRecord record(std::string scheme, long long n, double rmse_value) {
  return {"lotka-volterra", std::move(scheme), n, 3, rmse_value, 0.125, 5, ""};
}

}  // namespace

TEST(Rmse, IdenticalIsZero) {
  const Trajectory a = make_traj({{1, 2}, {3, 4}});
  EXPECT_EQ(rmse(a, a), 0.0);
}

TEST(Rmse, ConstantOffset) {
  const double d = 0.3;
  const Trajectory a = make_traj({{1, 2}, {3, 4}, {5, 6}});
  const Trajectory b = make_traj({{1 + d, 2 + d}, {3 + d, 4 + d}, {5 + d, 6 + d}});
  EXPECT_NEAR(rmse(a, b), d * std::sqrt(2.0), 1e-15);
}

TEST(Rmse, SymmetryAndTriangle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  auto random_traj = [&] {
    std::vector<RealState> s;
    for (int j = 0; j < 40; ++j) s.push_back({g(rng), g(rng), g(rng)});
    return make_traj(s);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory a = random_traj();
    const Trajectory b = random_traj();
    const Trajectory c = random_traj();
    EXPECT_EQ(rmse(a, b), rmse(b, a));
    EXPECT_LE(rmse(a, c), rmse(a, b) + rmse(b, c) + 1e-12);
  }
}

TEST(Rmse, GridMismatch) {
  const Trajectory a = make_traj({{1}, {2}});
  EXPECT_THROW(rmse(a, make_traj({{1}})), Error);
  EXPECT_THROW(rmse(a, make_traj({{1}, {2}}, 0.4)), Error);
  EXPECT_THROW(rmse(a, make_traj({{1, 1}, {2, 2}})), Error);
  EXPECT_THROW(rmse(Trajectory{}, Trajectory{}), Error);
}

TEST(Grid, UniformGridMatchesIntegrator) {
  const auto g = uniform_grid(100.0, 1000);
  const Trajectory t = integrate(lotka_volterra(), strang(2), 100.0, 1000, {100, 10});
  EXPECT_EQ(g, t.times);
}

TEST(Benchmark, EmptySchemeList) {
  EXPECT_TRUE(run_benchmark(lotka_volterra(), {}, {100}, 100.0, {100, 10}).empty());
}

TEST(Benchmark, RecordsOnePerSchemeAndN) {
  BenchOptions opts;
  opts.repeats = 3;
  const auto recs = run_benchmark(lotka_volterra(), {lie_trotter(2), strang(2)}, {200, 100}, 100.0, {100, 10}, opts);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0].scheme, "lie-trotter");
  EXPECT_EQ(recs[0].n, 100);
  EXPECT_EQ(recs[1].n, 200);
  for (const BenchmarkRecord& r : recs) {
    EXPECT_GE(r.rmse, 0.0);
    EXPECT_GT(r.wall_time_s, 0.0);
    EXPECT_GE(r.factor_count, 1);
    EXPECT_EQ(r.repeats, 3);
    EXPECT_TRUE(r.error.empty());
  }
  EXPECT_LT(recs[3].rmse, recs[1].rmse);
}

TEST(Benchmark, VanDerPolStrang) {
  BenchOptions opts;
  opts.repeats = 1;
  const auto recs = run_benchmark(van_der_pol(), {strang(2)}, {1000}, 25.0, {-0.2, 0.0}, opts);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_GT(recs[0].rmse, 1.1e-3 / 2);
  EXPECT_LT(recs[0].rmse, 1.1e-3 * 2);
}

TEST(Benchmark, FailureIsAttachedToRecord) {
  const SystemSpec fb = numeric_frozen_fallback(lotka_volterra().vector_field, 2, 4);
  BenchOptions opts;
  opts.repeats = 1;
  const auto recs = run_benchmark(fb, {strang(2), u_family(1)}, {50}, 10.0, {100, 10}, opts);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_TRUE(recs[0].error.empty());
  EXPECT_FALSE(recs[1].error.empty());
  EXPECT_TRUE(std::isnan(recs[1].rmse));
}

TEST(Benchmark, RepeatsValidated) {
  BenchOptions opts;
  opts.repeats = 0;
  EXPECT_THROW(run_benchmark(lotka_volterra(), {strang(2)}, {10}, 1.0, {100, 10}, opts), Error);
}

// A decade more steps should cost roughly a decade more time.
TEST(Benchmark, TimingScalesWithWork) {
  BenchOptions opts;
  opts.repeats = 7;
  const auto recs =
      run_benchmark(van_der_pol(), {named_scheme("8th", 2)}, {1000, 10000}, 25.0, {-0.2, 0.0}, opts);
  ASSERT_EQ(recs.size(), 2u);
  const double ratio = recs[1].wall_time_s / recs[0].wall_time_s;
  EXPECT_GT(ratio, 10.0 / 3.0);
  EXPECT_LT(ratio, 10.0 * 3.0);
}

TEST(Csv, EmptyIsHeaderOnly) {
  std::ostringstream os;
  emit_csv({}, os);
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n");
}

TEST(Csv, OneRecord) {
  std::ostringstream os;
  emit_csv({record("strang", 1000, 0.0174)}, os);
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\nlotka-volterra,strang,1000,3,0.017399999999999999,0.125,5\n");
}

TEST(Csv, SortedAndRoundTrips) {
  std::vector<BenchmarkRecord> recs{record("strang", 1000, 1.0 / 3), record("lie-trotter", 100, std::exp(1.0)),
                                    record("strang", 100, 1e-17), record("lie-trotter", 10, 2.5e300)};
  std::stringstream buf;
  emit_csv(recs, buf);
  const auto back = parse_csv(buf);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back[0].scheme, "strang");
  EXPECT_EQ(back[0].n, 100);
  EXPECT_EQ(back[1].n, 1000);
  EXPECT_EQ(back[2].scheme, "lie-trotter");
  EXPECT_EQ(back[2].n, 10);
  auto sorted = recs;
  sort_records(sorted);
  EXPECT_EQ(back, sorted);
}

TEST(Csv, UnwritablePath) {
  EXPECT_THROW(emit_csv(std::vector<BenchmarkRecord>{}, std::string("/nonexistent-dir/out.csv")), Error);
}

TEST(Csv, FileOutput) {
  const auto path = std::filesystem::temp_directory_path() / "cwsplit_bench_test.csv";
  emit_csv(std::vector<BenchmarkRecord>{record("3rd", 5, 0.5)}, path.string());
  std::ifstream in(path);
  EXPECT_EQ(parse_csv(in).at(0).scheme, "3rd");
  std::filesystem::remove(path);
}

TEST(Csv, MalformedInput) {
  std::istringstream no_header("a,b\n");
  EXPECT_THROW(parse_csv(no_header), Error);
  std::istringstream short_row(std::string(kCsvHeader) + "\nx,y,1\n");
  EXPECT_THROW(parse_csv(short_row), Error);
}

TEST(Presets, TableShapes) {
  EXPECT_EQ(table_preset(2).schemes.size() * table_preset(2).n_values.size(), 24u);
  EXPECT_EQ(table_preset(3).system, "van-der-pol");
  EXPECT_EQ(table_preset(4).schemes.size() * table_preset(4).n_values.size(), 12u);
  EXPECT_THROW(table_preset(5), Error);
}
