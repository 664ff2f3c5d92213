#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwsplit/error.hpp"
#include "cwsplit/scheme.hpp"

namespace cwsplit {

using RealState = std::vector<double>;
using ComplexState = std::vector<Complex>;

// du = F(u) for a real state.
using VectorField = std::function<void(std::span<const double> u, std::span<double> du)>;

// Frozen scalar flow: value of coordinate `coord` (1-based) after time s with
// all other coordinates of u held fixed. Called without argument checks.
using FrozenMap = std::function<Complex(int coord, std::span<const Complex> u, Complex s)>;

struct SystemSpec {
  int dim = 0;
  std::string name;
  std::map<std::string, double> params;
  VectorField vector_field;
  FrozenMap frozen;
  // True iff `frozen` accepts complex times and complex states.
  bool analytic_time = false;
};

/// e^w - 1 without cancellation near w = 0.
inline Complex expm1(Complex w) {
  const double x = w.real();
  const double y = w.imag();
  const double half_sin = std::sin(0.5 * y);
  const double ex = std::exp(x);
  return {std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin, ex * std::sin(y)};
}

/// phi(w) = (e^w - 1)/w, continuous through w = 0.
inline Complex phi1(Complex w) {
  if (std::abs(w) >= 1e-4) return expm1(w) / w;
  // 1 + w/2 + w^2/6 + w^3/24 + w^4/120 + w^5/720
  return 1.0 + w * (1.0 / 2 + w * (1.0 / 6 + w * (1.0 / 24 + w * (1.0 / 120 + w * (1.0 / 720)))));
}

namespace detail {

inline void require_finite_params(const std::map<std::string, double>& params, const std::string& system) {
  for (const auto& [key, value] : params) {
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::invalid_argument, system + ": parameter " + key + " is not finite");
    }
  }
}

inline bool is_real(std::span<const Complex> u) {
  for (const Complex& v : u) {
    if (v.imag() != 0.0) return false;
  }
  return true;
}

}  // namespace detail

/// Predator-prey system x' = x(alpha - beta y), y' = y(delta x - tau).
/// Both frozen flows are pure exponentials.
inline SystemSpec lotka_volterra(double alpha = 0.5, double beta = 0.02, double delta = 0.01, double tau = 0.1) {
  SystemSpec sys;
  sys.dim = 2;
  sys.name = "lotka-volterra";
  sys.params = {{"alpha", alpha}, {"beta", beta}, {"delta", delta}, {"tau", tau}};
  detail::require_finite_params(sys.params, sys.name);
  sys.analytic_time = true;
  sys.vector_field = [=](std::span<const double> u, std::span<double> du) {
    du[0] = u[0] * (alpha - beta * u[1]);
    du[1] = u[1] * (delta * u[0] - tau);
  };
  sys.frozen = [=](int coord, std::span<const Complex> u, Complex s) -> Complex {
    if (coord == 1) return u[0] * std::exp(s * (alpha - beta * u[1]));
    return u[1] * std::exp(s * (delta * u[0] - tau));
  };
  return sys;
}

/// Van der Pol oscillator as x' = y, y' = (1 - x^2) y - x. The frozen y-flow
/// y e^{sa} + b s phi(sa) with a = 1 - x^2, b = -x covers the a = 0 limit.
inline SystemSpec van_der_pol() {
  SystemSpec sys;
  sys.dim = 2;
  sys.name = "van-der-pol";
  sys.analytic_time = true;
  sys.vector_field = [](std::span<const double> u, std::span<double> du) {
    du[0] = u[1];
    du[1] = (1.0 - u[0] * u[0]) * u[1] - u[0];
  };
  sys.frozen = [](int coord, std::span<const Complex> u, Complex s) -> Complex {
    if (coord == 1) return u[0] + s * u[1];
    const Complex a = 1.0 - u[0] * u[0];
    const Complex b = -u[0];
    const Complex w = s * a;
    return u[1] * std::exp(w) + b * s * phi1(w);
  };
  return sys;
}

/// Lorenz system; all three frozen flows are affine relaxations.
inline SystemSpec lorenz(double alpha = 10.0, double rho = 28.0, double beta = 8.0 / 3.0) {
  SystemSpec sys;
  sys.dim = 3;
  sys.name = "lorenz";
  sys.params = {{"alpha", alpha}, {"rho", rho}, {"beta", beta}};
  detail::require_finite_params(sys.params, sys.name);
  if (alpha == 0.0 || beta == 0.0) {
    throw Error(ErrorKind::invalid_argument, "lorenz: decay rates alpha and beta must be nonzero");
  }
  sys.analytic_time = true;
  sys.vector_field = [=](std::span<const double> u, std::span<double> du) {
    du[0] = alpha * (u[1] - u[0]);
    du[1] = u[0] * (rho - u[2]) - u[1];
    du[2] = u[0] * u[1] - beta * u[2];
  };
  // Each map is target + (start - target) e^{-rate s}.
  sys.frozen = [=](int coord, std::span<const Complex> u, Complex s) -> Complex {
    switch (coord) {
      case 1: return u[0] - (u[1] - u[0]) * expm1(-alpha * s);
      case 2: {
        const Complex target = u[0] * (rho - u[2]);
        return u[1] - (target - u[1]) * expm1(-s);
      }
      default: {
        const Complex target = u[0] * u[1] / beta;
        return u[2] - (target - u[2]) * expm1(-beta * s);
      }
    }
  };
  return sys;
}

/// Decoupled linear system u_i' = rate_i u_i. Every splitting of it is exact.
inline SystemSpec linear_diagonal(std::vector<double> rates) {
  if (rates.empty()) throw Error(ErrorKind::invalid_dimension, "linear_diagonal: no rates");
  SystemSpec sys;
  sys.dim = static_cast<int>(rates.size());
  sys.name = "linear-diagonal";
  for (std::size_t i = 0; i < rates.size(); ++i) sys.params["rate" + std::to_string(i + 1)] = rates[i];
  detail::require_finite_params(sys.params, sys.name);
  sys.analytic_time = true;
  sys.vector_field = [rates](std::span<const double> u, std::span<double> du) {
    for (std::size_t i = 0; i < rates.size(); ++i) du[i] = rates[i] * u[i];
  };
  sys.frozen = [rates](int coord, std::span<const Complex> u, Complex s) -> Complex {
    const auto i = static_cast<std::size_t>(coord - 1);
    return u[i] * std::exp(s * rates[i]);
  };
  return sys;
}

/// Wraps an arbitrary field; each frozen flow is integrated by classical RK4
/// with `substeps` equal sub-steps. Real times and real states only.
inline SystemSpec numeric_frozen_fallback(VectorField field, int dim, int substeps,
                                          std::string name = "fallback") {
  if (dim < 1) throw Error(ErrorKind::invalid_dimension, "numeric_frozen_fallback: dim must be >= 1");
  if (substeps < 1) throw Error(ErrorKind::invalid_argument, "numeric_frozen_fallback: substeps must be >= 1");
  if (!field) throw Error(ErrorKind::invalid_argument, "numeric_frozen_fallback: empty vector field");
  SystemSpec sys;
  sys.dim = dim;
  sys.name = std::move(name);
  sys.analytic_time = false;
  sys.vector_field = field;
  sys.frozen = [field, dim, substeps](int coord, std::span<const Complex> u, Complex s) -> Complex {
    const auto n = static_cast<std::size_t>(dim);
    const auto i = static_cast<std::size_t>(coord - 1);
    std::vector<double> x(n);
    std::vector<double> dx(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = u[j].real();
    auto rhs = [&](double w) {
      x[i] = w;
      field(x, dx);
      return dx[i];
    };
    const double h = s.real() / substeps;
    double w = x[i];
    for (int k = 0; k < substeps; ++k) {
      const double k1 = rhs(w);
      const double k2 = rhs(w + 0.5 * h * k1);
      const double k3 = rhs(w + 0.5 * h * k2);
      const double k4 = rhs(w + h * k3);
      w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
  };
  return sys;
}

/// Checked frozen-flow evaluation.
inline Complex frozen_eval(const SystemSpec& sys, int coord, std::span<const Complex> u, Complex s) {
  if (coord < 1 || coord > sys.dim) {
    throw Error(ErrorKind::invalid_argument, "coordinate " + std::to_string(coord) + " outside 1.." +
                                                 std::to_string(sys.dim));
  }
  if (u.size() != static_cast<std::size_t>(sys.dim)) {
    throw Error(ErrorKind::invalid_dimension, "state has " + std::to_string(u.size()) + " entries, system " +
                                                  sys.name + " has dim " + std::to_string(sys.dim));
  }
  if (!sys.analytic_time && (s.imag() != 0.0 || !detail::is_real(u))) {
    throw Error(ErrorKind::complex_time_unsupported, sys.name + " only supports real times and states");
  }
  return sys.frozen(coord, u, s);
}

inline std::vector<std::string> system_names() { return {"lotka-volterra", "van-der-pol", "lorenz"}; }

/// Builds a named system, overriding default parameters by key.
inline SystemSpec make_system(const std::string& name, const std::map<std::string, double>& overrides = {}) {
  auto pick = [&](const std::map<std::string, double>& defaults) {
    for (const auto& [key, value] : overrides) {
      if (!defaults.contains(key)) {
        throw Error(ErrorKind::invalid_argument, "system " + name + " has no parameter '" + key + "'");
      }
    }
    std::map<std::string, double> p = defaults;
    for (const auto& [key, value] : overrides) p[key] = value;
    return p;
  };
  if (name == "lotka-volterra") {
    auto p = pick({{"alpha", 0.5}, {"beta", 0.02}, {"delta", 0.01}, {"tau", 0.1}});
    return lotka_volterra(p["alpha"], p["beta"], p["delta"], p["tau"]);
  }
  if (name == "van-der-pol") {
    pick({});
    return van_der_pol();
  }
  if (name == "lorenz") {
    auto p = pick({{"alpha", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}});
    return lorenz(p["alpha"], p["rho"], p["beta"]);
  }
  throw Error(ErrorKind::invalid_argument, "unknown system '" + name + "'");
}

// Experiment setup: horizon and initial state.
struct Experiment {
  double horizon;
  RealState initial_state;
};

inline Experiment default_experiment(const std::string& name) {
  if (name == "lotka-volterra") return {100.0, {100.0, 10.0}};
  if (name == "van-der-pol") return {25.0, {-0.2, 0.0}};
  if (name == "lorenz") return {20.0, {1.0, 1.0, 1.0}};
  throw Error(ErrorKind::invalid_argument, "no default experiment for system '" + name + "'");
}

}  // namespace cwsplit
