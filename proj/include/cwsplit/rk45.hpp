#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwsplit/error.hpp"
#include "cwsplit/integrator.hpp"
#include "cwsplit/systems.hpp"

namespace cwsplit {

// Dormand-Prince 5(4) Butcher tableau.
struct DormandPrince {
  static constexpr int stages = 7;
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr std::array<std::array<double, 6>, 7> a{{
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  }};
  // Fifth-order weights (propagated solution).
  static constexpr std::array<double, 7> b{35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  // Embedded fourth-order weights.
  static constexpr std::array<double, 7> b_hat{5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

struct RKOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  std::optional<double> initial_step;
  long long max_steps = 10'000'000;
  double safety = 0.9;
};

namespace detail {

// One Dormand-Prince step from y with stage-1 derivative k[0] already filled.
// Writes the fifth-order result to y_new, the error estimate to err, and the
// derivative at y_new to k[6] (first same as last).
inline void dopri_step(const VectorField& f, std::span<const double> y, double h,
                       std::array<std::vector<double>, 7>& k, std::vector<double>& y_new,
                       std::vector<double>& err) {
  using T = DormandPrince;
  const std::size_t n = y.size();
  std::vector<double> tmp(n);
  for (int s = 1; s < T::stages; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += T::a[s][j] * k[j][i];
      tmp[i] = y[i] + h * acc;
    }
    f(tmp, k[s]);
  }
  // Stage 7 is evaluated at the fifth-order solution, so tmp already holds y_new.
  y_new = tmp;
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (int j = 0; j < T::stages; ++j) e += (T::b[j] - T::b_hat[j]) * k[j][i];
    err[i] = h * e;
  }
}

inline double rms_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(v.size(), 1)));
}

}  // namespace detail

/// Adaptive Dormand-Prince integration of u' = F(u) that lands exactly on
/// every requested grid time by shortening the step that would overshoot it.
inline Trajectory rk45_solve(const SystemSpec& sys, double horizon, std::span<const double> grid,
                             const RealState& u0, const RKOptions& opts = {}) {
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerances must be positive");
  if (opts.max_steps < 1) throw Error(ErrorKind::invalid_argument, "max_steps must be >= 1");
  if (u0.size() != static_cast<std::size_t>(sys.dim)) {
    throw Error(ErrorKind::invalid_dimension, "initial state size does not match system dim");
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0) || grid[j] > horizon || (j > 0 && grid[j] < grid[j - 1])) {
      throw Error(ErrorKind::invalid_argument, "grid times must be nondecreasing and lie in (0, T]");
    }
  }

  const std::size_t n = u0.size();
  const VectorField& f = sys.vector_field;
  Trajectory traj;
  traj.scheme_label = "rk45";
  traj.n = static_cast<long long>(grid.size());
  traj.horizon = horizon;
  traj.times.reserve(grid.size());
  traj.states.reserve(grid.size());

  std::vector<double> y(u0);
  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(n, 0.0);
  std::vector<double> y_new(n);
  std::vector<double> err(n);
  std::vector<double> scaled(n);
  f(y, k[0]);

  double h = 0.0;
  if (opts.initial_step) {
    h = *opts.initial_step;
  } else {
    const double d0 = detail::rms_norm(y);
    const double d1 = detail::rms_norm(k[0]);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "initial step must be positive");

  double t = 0.0;
  long long steps = 0;
  for (double target : grid) {
    while (t < target) {
      if (++steps > opts.max_steps) {
        throw Error(ErrorKind::non_convergence, "rk45: exceeded " + std::to_string(opts.max_steps) + " steps");
      }
      const bool lands = t + h >= target;
      const double h_try = lands ? target - t : h;
      detail::dopri_step(f, y, h_try, k, y_new, err);
      for (std::size_t i = 0; i < n; ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        scaled[i] = err[i] / sc;
      }
      const double e = detail::rms_norm(scaled);
      if (!std::isfinite(e)) {
        throw Error(ErrorKind::overflow, "rk45: non-finite state near t = " + std::to_string(t));
      }
      double factor = e == 0.0 ? 5.0 : opts.safety * std::pow(e, -0.2);
      factor = std::clamp(factor, 0.2, 5.0);
      if (e <= 1.0) {
        t = lands ? target : t + h_try;
        y.swap(y_new);
        k[0].swap(k[6]);
        // A step shortened to land on the grid does not shrink the proposal.
        h = lands ? std::max(h, h_try * factor) : h_try * factor;
      } else {
        h = h_try * factor;
      }
      if (!(h > 0.0) || t + h == t) {
        throw Error(ErrorKind::non_convergence, "rk45: step size underflow near t = " + std::to_string(t));
      }
    }
    traj.times.push_back(target);
    traj.states.push_back(y);
  }
  return traj;
}

/// Fixed-step Dormand-Prince (fifth-order solution, no error control).
inline RealState rk45_fixed(const SystemSpec& sys, double horizon, long long steps, const RealState& u0) {
  if (steps < 1) throw Error(ErrorKind::invalid_argument, "steps must be >= 1");
  const std::size_t n = u0.size();
  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(n, 0.0);
  std::vector<double> y(u0);
  std::vector<double> y_new(n);
  std::vector<double> err(n);
  const double h = horizon / static_cast<double>(steps);
  sys.vector_field(y, k[0]);
  for (long long s = 0; s < steps; ++s) {
    detail::dopri_step(sys.vector_field, y, h, k, y_new, err);
    y.swap(y_new);
    k[0].swap(k[6]);
  }
  return y;
}

}  // namespace cwsplit
