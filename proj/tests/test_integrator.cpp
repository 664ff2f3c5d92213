#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "cwsplit/integrator.hpp"
#include "cwsplit/scheme_io.hpp"

using namespace cwsplit;

namespace {

SystemSpec zero_field(int dim) {
  return numeric_frozen_fallback([](std::span<const double>, std::span<double> du) {
    for (double& v : du) v = 0.0;
  }, dim, 4, "zero");
}

}  // namespace

TEST(Step, EmptySchemeLeavesStateUnchanged) {
  const Scheme empty{2, {}, 1, "empty"};
  const ComplexState u{Complex(1, 2), 3};
  EXPECT_EQ(step(lotka_volterra(), empty, 0.1, u), u);
}

TEST(Step, LotkaVolterraLieTrotterByHand) {
  const ComplexState u = step(lotka_volterra(), lie_trotter(2), 0.1, {100, 10});
  const double x1 = 100 * std::exp(0.1 * 0.3);
  const double y1 = 10 * std::exp(0.1 * (0.01 * x1 - 0.1));
  EXPECT_NEAR(u[0].real(), x1, 1e-12);
  EXPECT_NEAR(u[1].real(), y1, 1e-13);
  EXPECT_EQ(u[0].imag(), 0.0);
}

TEST(Step, DecoupledLinearLieTrotterIsExact) {
  const SystemSpec sys = linear_diagonal({-0.7, 1.3});
  const ComplexState u = step(sys, lie_trotter(2), 0.25, {2, -1});
  EXPECT_NEAR(u[0].real(), 2 * std::exp(-0.7 * 0.25), 1e-15);
  EXPECT_NEAR(u[1].real(), -std::exp(1.3 * 0.25), 1e-15);
}

TEST(Step, Errors) {
  const SystemSpec lv = lotka_volterra();
  EXPECT_THROW(step(lv, strang(3), 0.1, {1, 1}), Error);
  EXPECT_THROW(step(lv, strang(2), 0.0, {1, 1}), Error);
  EXPECT_THROW(step(lv, strang(2), 0.1, {1, 1, 1}), Error);
  const SystemSpec fb = numeric_frozen_fallback(lv.vector_field, 2, 8);
  try {
    step(fb, u_family(1), 0.1, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::complex_time_unsupported);
  }
}

TEST(Step, OverflowNamesFactor) {
  const SystemSpec sys = linear_diagonal({1500.0, 1.0});
  try {
    step(sys, strang(2), 1.0, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overflow);
    EXPECT_NE(std::string(e.what()).find("factor 0"), std::string::npos) << e.what();
  }
}

TEST(Integrate, SingleStepMatchesStep) {
  const SystemSpec sys = van_der_pol();
  const Scheme s = u_family(1);
  const Trajectory traj = integrate(sys, s, 0.3, 1, {-0.2, 0.0});
  const ComplexState u = step(sys, s, 0.3, {-0.2, 0.0});
  ASSERT_EQ(traj.states.size(), 1u);
  EXPECT_EQ(traj.states[0][0], u[0].real());
  EXPECT_EQ(traj.states[0][1], u[1].real());
  EXPECT_EQ(traj.times[0], 0.3);
}

TEST(Integrate, GridIsUniformAndPositive) {
  const Trajectory traj = integrate(lotka_volterra(), strang(2), 100.0, 1000, {100, 10});
  ASSERT_EQ(traj.times.size(), 1000u);
  ASSERT_EQ(traj.states.size(), 1000u);
  for (std::size_t j = 0; j < traj.times.size(); ++j) EXPECT_EQ(traj.times[j], static_cast<double>(j + 1) * 0.1);
  EXPECT_NEAR(traj.times.back(), 100.0, 1e-12);
  EXPECT_EQ(traj.n, 1000);
  EXPECT_EQ(traj.scheme_label, "strang");
}

TEST(Integrate, ZeroFieldKeepsInitialState) {
  for (const Scheme& s : {lie_trotter(3), strang(3), Scheme{3, {}, 1, "empty"}}) {
    const Trajectory traj = integrate(zero_field(3), s, 2.0, 50, {1, -2, 3});
    for (const RealState& x : traj.states) EXPECT_EQ(x, (RealState{1, -2, 3}));
    EXPECT_EQ(traj.max_imag, 0.0);
  }
}

TEST(Integrate, StepCompositionIsExact) {
  const SystemSpec sys = lotka_volterra();
  const Scheme s = u_family(1);
  const double h = 0.1;
  const Trajectory traj = integrate(sys, s, 20 * h, 20, {100, 10});
  ComplexState u{100, 10};
  for (int k = 0; k < 20; ++k) {
    u = step(sys, s, h, u);
    EXPECT_EQ(traj.states[static_cast<std::size_t>(k)][0], u[0].real()) << k;
    EXPECT_EQ(traj.states[static_cast<std::size_t>(k)][1], u[1].real()) << k;
  }
}

TEST(Integrate, Deterministic) {
  const SystemSpec sys = lorenz();
  const Scheme s = named_scheme("3rd", 3);
  const Trajectory a = integrate(sys, s, 1.0, 500, {1, 1, 1});
  const Trajectory b = integrate(sys, s, 1.0, 500, {1, 1, 1});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.max_imag, b.max_imag);
}

TEST(Integrate, RealSchemesHaveNoImaginaryPart) {
  EXPECT_EQ(integrate(lorenz(), strang(3), 2.0, 400, {1, 1, 1}).max_imag, 0.0);
  EXPECT_EQ(integrate(van_der_pol(), lie_trotter(2), 5.0, 100, {-0.2, 0}).max_imag, 0.0);
}

TEST(Integrate, ComplexSchemeReportsImaginaryDrift) {
  const Trajectory traj = integrate(lotka_volterra(), u_family(1), 100.0, 100, {100, 10});
  EXPECT_GT(traj.max_imag, 0.0);
  IntegratorOptions opts;
  opts.project_real_each_step = true;
  const Trajectory projected = integrate(lotka_volterra(), u_family(1), 100.0, 100, {100, 10}, opts);
  EXPECT_GT(projected.max_imag, 0.0);
  EXPECT_NE(projected.states.back(), traj.states.back());
}

TEST(Integrate, RecordStride) {
  IntegratorOptions opts;
  opts.record_every = 10;
  const Trajectory traj = integrate(lotka_volterra(), strang(2), 10.0, 100, {100, 10}, opts);
  const Trajectory full = integrate(lotka_volterra(), strang(2), 10.0, 100, {100, 10});
  ASSERT_EQ(traj.times.size(), 10u);
  EXPECT_EQ(traj.states[9], full.states[99]);
  EXPECT_EQ(traj.times[0], full.times[9]);
}

TEST(Integrate, DecoupledSystemsAreExactForEveryScheme) {
  const std::vector<double> rates{-0.9, 0.4, -0.15};
  const SystemSpec sys3 = linear_diagonal(rates);
  const SystemSpec sys2 = linear_diagonal({-0.9, 0.4});
  std::vector<Scheme> schemes{lie_trotter(3), strang(3), named_scheme("3rd", 3), named_scheme("4th", 3)};
  for (const char* name : {"3rd", "4th", "8th", "10th"}) schemes.push_back(named_scheme(name, 2));
  const double h = 0.05;
  for (const Scheme& s : schemes) {
    const SystemSpec& sys = s.dim == 3 ? sys3 : sys2;
    const RealState u0(rates.begin(), rates.begin() + s.dim);
    const ComplexState u = step(sys, s, h, ComplexState(u0.begin(), u0.end()));
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double exact = u0[i] * std::exp(rates[i] * h);
      EXPECT_LE(std::abs(u[i] - exact), 1e-12 * std::abs(exact)) << s.label << " coord " << i + 1;
    }
  }
}

TEST(Integrate, ArgumentChecks) {
  const SystemSpec lv = lotka_volterra();
  EXPECT_THROW(integrate(lv, strang(2), 0.0, 10, {1, 1}), Error);
  EXPECT_THROW(integrate(lv, strang(2), 1.0, 0, {1, 1}), Error);
  EXPECT_THROW(integrate(lv, strang(2), 1.0, 10, {1}), Error);
  IntegratorOptions opts;
  opts.record_every = 0;
  EXPECT_THROW(integrate(lv, strang(2), 1.0, 10, {1, 1}, opts), Error);
}

TEST(Integrate, StepErrorCarriesIndex) {
  const SystemSpec sys = linear_diagonal({300.0, 1.0});
  try {
    integrate(sys, lie_trotter(2), 10.0, 10, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overflow);
    EXPECT_NE(std::string(e.what()).find("step "), std::string::npos);
  }
}
