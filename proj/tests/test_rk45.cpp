#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cwsplit/bench.hpp"
#include "cwsplit/rk45.hpp"

using namespace cwsplit;

namespace {

SystemSpec field_only(int dim, VectorField f) {
  SystemSpec sys;
  sys.dim = dim;
  sys.name = "field";
  sys.vector_field = std::move(f);
  return sys;
}

SystemSpec decay() {
  return field_only(1, [](std::span<const double> u, std::span<double> du) { du[0] = -u[0]; });
}

}  // namespace

TEST(Tableau, RowSumsAndWeights) {
  using T = DormandPrince;
  for (std::size_t i = 0; i < 7; ++i) {
    double row = 0.0;
    for (double v : T::a[i]) row += v;
    EXPECT_NEAR(row, T::c[i], 1e-15) << "row " << i;
  }
  double b1 = 0.0, bc = 0.0, bh1 = 0.0, bhc = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    b1 += T::b[i];
    bc += T::b[i] * T::c[i];
    bh1 += T::b_hat[i];
    bhc += T::b_hat[i] * T::c[i];
  }
  EXPECT_NEAR(b1, 1.0, 1e-15);
  EXPECT_NEAR(bc, 0.5, 1e-15);
  EXPECT_NEAR(bh1, 1.0, 1e-15);
  EXPECT_NEAR(bhc, 0.5, 1e-15);
}

TEST(Rk45, ExponentialDecay) {
  const std::vector<double> grid{1.0};
  const Trajectory t = rk45_solve(decay(), 1.0, grid, {1.0});
  ASSERT_EQ(t.states.size(), 1u);
  EXPECT_NEAR(t.states[0][0], std::exp(-1.0), 1e-10);
  EXPECT_EQ(t.max_imag, 0.0);
}

TEST(Rk45, ZeroFieldIsConstant) {
  const SystemSpec sys = field_only(2, [](std::span<const double>, std::span<double> du) { du[0] = du[1] = 0.0; });
  const auto grid = uniform_grid(5.0, 10);
  const Trajectory t = rk45_solve(sys, 5.0, grid, {3.0, -4.0});
  for (const RealState& x : t.states) EXPECT_EQ(x, (RealState{3.0, -4.0}));
}

TEST(Rk45, HarmonicOscillatorPeriod) {
  const SystemSpec sys = field_only(2, [](std::span<const double> u, std::span<double> du) {
    du[0] = u[1];
    du[1] = -u[0];
  });
  const double period = 2 * std::numbers::pi;
  const std::vector<double> grid{period};
  const Trajectory t = rk45_solve(sys, period, grid, {1.0, 0.0});
  EXPECT_NEAR(t.states[0][0], 1.0, 1e-8);
  EXPECT_NEAR(t.states[0][1], 0.0, 1e-8);
}

TEST(Rk45, LandsExactlyOnGrid) {
  const auto grid = uniform_grid(100.0, 1000);
  const Trajectory t = rk45_solve(lotka_volterra(), 100.0, grid, {100, 10});
  ASSERT_EQ(t.times.size(), grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_EQ(t.times[j], grid[j]);
}

// rtol 1e-12 and 1e-10 agree to 1e-9 relative to the state scale (|u| reaches
// about 117 here). An absolute 1e-8 is beyond fifth-order error control at
// rtol 1e-10; the measured gap is about 9e-8.
TEST(Rk45, ToleranceConsistency) {
  const auto grid = uniform_grid(100.0, 1000);
  const Trajectory tight = rk45_solve(lotka_volterra(), 100.0, grid, {100, 10});
  RKOptions loose;
  loose.rtol = 1e-10;
  const Trajectory coarse = rk45_solve(lotka_volterra(), 100.0, grid, {100, 10}, loose);
  double sup = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t i = 0; i < 2; ++i) sup = std::max(sup, std::abs(tight.states[j][i] - coarse.states[j][i]));
  double scale = 0.0;
  for (const RealState& x : tight.states)
    for (double v : x) scale = std::max(scale, std::abs(v));
  EXPECT_LE(sup, 1e-9 * scale);
}

// Global error of the fixed-step fifth-order solution at T = 1 shrinks by 2^5
// per halving of h.
TEST(Rk45, FifthOrderConvergence) {
  std::vector<double> h;
  std::vector<double> err;
  for (long long steps : {4, 8, 16, 32}) {
    const RealState y = rk45_fixed(decay(), 1.0, steps, {1.0});
    h.push_back(1.0 / static_cast<double>(steps));
    err.push_back(std::abs(y[0] - std::exp(-1.0)));
  }
  double sxy = 0, sxx = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / h.size();
    my += std::log(err[i]) / h.size();
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  EXPECT_NEAR(sxy / sxx, 5.0, 0.2);
}

TEST(Rk45, StepLimit) {
  RKOptions opts;
  opts.max_steps = 5;
  const std::vector<double> grid{100.0};
  try {
    rk45_solve(lotka_volterra(), 100.0, grid, {100, 10}, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergence);
  }
}

TEST(Rk45, BlowUpIsOverflow) {
  const SystemSpec sys = field_only(1, [](std::span<const double> u, std::span<double> du) { du[0] = u[0] * u[0]; });
  const std::vector<double> grid{2.0};
  try {
    rk45_solve(sys, 2.0, grid, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::overflow || e.kind() == ErrorKind::non_convergence) << e.what();
  }
}

TEST(Rk45, GridValidation) {
  const std::vector<double> backwards{0.5, 0.2};
  EXPECT_THROW(rk45_solve(decay(), 1.0, backwards, {1.0}), Error);
  const std::vector<double> beyond{1.5};
  EXPECT_THROW(rk45_solve(decay(), 1.0, beyond, {1.0}), Error);
  const std::vector<double> zero{0.0};
  EXPECT_THROW(rk45_solve(decay(), 1.0, zero, {1.0}), Error);
}
