#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cwsplit/error.hpp"
#include "cwsplit/scheme.hpp"
#include "cwsplit/systems.hpp"

namespace cwsplit {

// States recorded on the uniform grid t_j = j T / n, j = 1..n (every
// `record_every`-th point when a stride is set).
struct Trajectory {
  std::vector<double> times;
  std::vector<RealState> states;
  double max_imag = 0.0;
  std::string scheme_label;
  long long n = 0;
  double horizon = 0.0;
  // Set when max_imag exceeded the warning threshold relative to the state norm.
  bool imag_warning = false;
};

struct IntegratorOptions {
  bool project_real_each_step = false;
  double imag_warn_threshold = 1e-6;
  long long record_every = 1;
};

namespace detail {

inline bool has_complex_coefficient(const Scheme& s) {
  return std::any_of(s.factors.begin(), s.factors.end(),
                     [](const Factor& f) { return f.coeff.imag() != 0.0; });
}

inline void check_compatible(const SystemSpec& sys, const Scheme& scheme) {
  if (scheme.dim != sys.dim) {
    throw Error(ErrorKind::invalid_dimension, "scheme dim " + std::to_string(scheme.dim) +
                                                  " does not match system dim " + std::to_string(sys.dim));
  }
  for (const Factor& f : scheme.factors) {
    if (f.coord < 1 || f.coord > sys.dim) {
      throw Error(ErrorKind::invalid_argument, "factor coordinate out of range");
    }
  }
  if (!sys.analytic_time && has_complex_coefficient(scheme)) {
    throw Error(ErrorKind::complex_time_unsupported,
                "scheme " + scheme.label + " has complex coefficients but system " + sys.name +
                    " has no complex-time frozen flows");
  }
}

// Applies the factors in order; assumes check_compatible has passed.
inline void apply_step(const SystemSpec& sys, const Scheme& scheme, double h, std::span<Complex> u) {
  for (std::size_t j = 0; j < scheme.factors.size(); ++j) {
    const Factor& f = scheme.factors[j];
    const Complex v = sys.frozen(f.coord, u, f.coeff * h);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorKind::overflow, "non-finite value after factor " + std::to_string(j) + " (coordinate " +
                                           std::to_string(f.coord) + ")");
    }
    u[static_cast<std::size_t>(f.coord - 1)] = v;
  }
}

}  // namespace detail

/// One step of size h: each factor (i, c) replaces u_i by its frozen flow over time c h.
inline ComplexState step(const SystemSpec& sys, const Scheme& scheme, double h, ComplexState u) {
  detail::check_compatible(sys, scheme);
  if (u.size() != static_cast<std::size_t>(sys.dim)) {
    throw Error(ErrorKind::invalid_dimension, "state size does not match system dim");
  }
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "step size must be positive");
  if (!sys.analytic_time && !detail::is_real(u)) {
    throw Error(ErrorKind::complex_time_unsupported, "complex state on system " + sys.name);
  }
  detail::apply_step(sys, scheme, h, u);
  return u;
}

/// Runs n steps of size T/n from u0 and records real parts on the output grid.
inline Trajectory integrate(const SystemSpec& sys, const Scheme& scheme, double horizon, long long n,
                            const RealState& u0, const IntegratorOptions& opts = {}) {
  detail::check_compatible(sys, scheme);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::invalid_argument, "T must be positive");
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (opts.record_every < 1) throw Error(ErrorKind::invalid_argument, "record_every must be >= 1");
  if (!(opts.imag_warn_threshold > 0.0)) throw Error(ErrorKind::invalid_argument, "imag_warn_threshold must be positive");
  if (u0.size() != static_cast<std::size_t>(sys.dim)) {
    throw Error(ErrorKind::invalid_dimension, "initial state size does not match system dim");
  }

  const double h = horizon / static_cast<double>(n);
  Trajectory traj;
  traj.scheme_label = scheme.label;
  traj.n = n;
  traj.horizon = horizon;
  const auto recorded = static_cast<std::size_t>(n / opts.record_every);
  traj.times.reserve(recorded);
  traj.states.reserve(recorded);

  ComplexState u(u0.begin(), u0.end());
  for (long long k = 1; k <= n; ++k) {
    try {
      detail::apply_step(sys, scheme, h, u);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(k) + ": " + e.message());
    }
    if (k % opts.record_every == 0) {
      RealState x(u.size());
      double norm2 = 0.0;
      double imag = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        x[i] = u[i].real();
        norm2 += std::norm(u[i]);
        imag = std::max(imag, std::abs(u[i].imag()));
      }
      traj.max_imag = std::max(traj.max_imag, imag);
      if (imag > opts.imag_warn_threshold * std::sqrt(norm2)) traj.imag_warning = true;
      traj.times.push_back(static_cast<double>(k) * h);
      traj.states.push_back(std::move(x));
    }
    if (opts.project_real_each_step) {
      for (Complex& v : u) v = v.real();
    }
  }
  return traj;
}

}  // namespace cwsplit
