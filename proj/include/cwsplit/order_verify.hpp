#pragma once

#include <cmath>
#include <cstdio>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cwsplit/bench.hpp"
#include "cwsplit/error.hpp"
#include "cwsplit/extended.hpp"
#include "cwsplit/integrator.hpp"
#include "cwsplit/rk45.hpp"
#include "cwsplit/scheme.hpp"
#include "cwsplit/systems.hpp"

namespace cwsplit {

// Small dense row-major complex matrix over the real type R.
template <class R>
class BasicMatrix {
 public:
  using Scalar = std::complex<R>;

  BasicMatrix() = default;
  explicit BasicMatrix(std::size_t n) : n_(n), data_(n * n) {}

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = R(1);
    return m;
  }

  std::size_t rows() const noexcept { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  BasicMatrix& operator*=(Scalar c) {
    for (Scalar& v : data_) v *= c;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(BasicMatrix a, Scalar c) { return a *= c; }
  friend BasicMatrix operator*(Scalar c, BasicMatrix a) { return a *= c; }

  friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
    const std::size_t n = a.n_;
    BasicMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const Scalar aik = a(i, k);
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  R frobenius_norm() const {
    R s = 0;
    for (const Scalar& v : data_) s += v.real() * v.real() + v.imag() * v.imag();
    return RealOps<R>::sqrt(s);
  }

  template <class S>
  BasicMatrix<S> cast() const {
    BasicMatrix<S> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(i, j) = std::complex<S>(S((*this)(i, j).real()), S((*this)(i, j).imag()));
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> data_;
};

using Matrix = BasicMatrix<double>;

// Taylor truncation threshold for expm.
template <class R>
R expm_term_tolerance() {
  return RealOps<R>::epsilon() * R(1e-3);
}
template <>
inline double expm_term_tolerance<double>() {
  return 1e-18;
}

/// Matrix exponential by scaling and squaring: scale so the Frobenius norm
/// is at most 1/2, sum the Taylor series until a term drops below the
/// threshold (1e-18 in double precision), then square back.
template <class R>
BasicMatrix<R> expm(const BasicMatrix<R>& m) {
  using Ops = RealOps<R>;
  const std::size_t n = m.rows();
  const double norm = static_cast<double>(m.frobenius_norm());
  if (!std::isfinite(norm)) throw Error(ErrorKind::invalid_argument, "expm: non-finite matrix");
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const BasicMatrix<R> a = m * std::complex<R>(Ops::ldexp(R(1), -squarings));

  const R tol = expm_term_tolerance<R>();
  BasicMatrix<R> result = BasicMatrix<R>::identity(n);
  BasicMatrix<R> term = BasicMatrix<R>::identity(n);
  for (int k = 1; k < 200; ++k) {
    term = term * a;
    term *= std::complex<R>(R(1) / R(k));
    result += term;
    if (term.frobenius_norm() <= tol) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Two real generators with entries uniform in [-1, 1].
struct MatrixPair {
  Matrix m1;
  Matrix m2;
  std::uint64_t seed = 0;
};

/// Entries come from std::mt19937_64 seeded with `seed`, mapped as
/// u = (x >> 11) * 2^-53 and entry = 2u - 1, filling m1 then m2 row-major.
inline MatrixPair random_matrix_pair(std::uint64_t seed, std::size_t d = 3) {
  if (d < 1) throw Error(ErrorKind::invalid_dimension, "matrix dimension must be >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  MatrixPair p{Matrix(d), Matrix(d), seed};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) p.m1(i, j) = draw();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) p.m2(i, j) = draw();
  return p;
}

/// Product of the factor exponentials in chronological order.
inline Matrix scheme_matrix(const MatrixPair& pair, const Scheme& s, double t) {
  if (!is_two_operator(s)) throw Error(ErrorKind::invalid_argument, "matrix oracle needs a two-operator scheme");
  Matrix product = Matrix::identity(pair.m1.rows());
  for (const Factor& f : s.factors) {
    const Matrix& gen = f.coord == 1 ? pair.m1 : pair.m2;
    product = product * expm(gen * (f.coeff * t));
  }
  return product;
}

/// Frobenius distance between the composition and exp(t (M1 + M2)).
inline double scheme_matrix_error(const MatrixPair& pair, const Scheme& s, double t) {
  const Matrix exact = expm((pair.m1 + pair.m2) * Complex(t));
  return (scheme_matrix(pair, s, t) - exact).frobenius_norm();
}

/// The same error for a recursive family member with coefficients, matrix
/// products and exponentials all evaluated in precision R.
template <class R>
double family_matrix_error(const MatrixPair& pair, char family, int k, double t) {
  using M = BasicMatrix<R>;
  using C = std::complex<R>;
  const M m1 = pair.m1.cast<R>();
  const M m2 = pair.m2.cast<R>();
  const R tr = R(t);
  M product = M::identity(m1.rows());
  for (const BasicFactor<R>& f : family_factors<R>(family, k)) {
    product = product * expm((f.coord == 1 ? m1 : m2) * (f.coeff * C(tr)));
  }
  const M exact = expm((m1 + m2) * C(tr));
  return static_cast<double>((product - exact).frobenius_norm());
}

inline constexpr double kMatrixPrecisionFloor = 1e-14;

/// Least-squares slope of log y against log x.
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace detail {

inline double fit_above_floor(std::span<const double> t_values, std::span<const double> errors, double floor,
                              const std::string& label) {
  std::vector<double> ts;
  std::vector<double> errs;
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (errors[i] > floor) {
      ts.push_back(t_values[i]);
      errs.push_back(errors[i]);
    }
  }
  if (ts.size() < 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0e", floor);
    throw Error(ErrorKind::precision_floor,
                "errors of scheme " + label + " are below " + buf + " for the requested t; use larger t values");
  }
  return log_log_slope(ts, errs);
}

}  // namespace detail

/// Local error slope over t_values; points with error below the 1e-14 floor
/// are left out of the fit.
inline double local_order_slope(const MatrixPair& pair, const Scheme& s, std::span<const double> t_values) {
  std::vector<double> errs;
  for (double t : t_values) errs.push_back(scheme_matrix_error(pair, s, t));
  return detail::fit_above_floor(t_values, errs, kMatrixPrecisionFloor, s.label);
}

/// Geometric t grid 2^lo_exp .. 2^hi_exp with `count` points.
inline std::vector<double> geometric_t_values(double lo_exp, double hi_exp, int count) {
  std::vector<double> t;
  for (int i = 0; i < count; ++i) {
    const double e = lo_exp + (hi_exp - lo_exp) * i / (count - 1);
    t.push_back(std::exp2(e));
  }
  return t;
}

// Fit window, tolerance and arithmetic used to certify a declared order.
struct OrderCertification {
  std::vector<double> t_values;
  double tolerance = 0.3;
  // Evaluate in extended precision (needs a recursive family member).
  bool extended = false;
};

/// Windows keep the fitted errors between the arithmetic's roundoff floor
/// and the onset of higher-order terms, for 3x3 generators with entries in
/// [-1, 1]. Orders 8 and above are evaluated in extended precision.
inline OrderCertification certification_window(int declared_order) {
  if (declared_order <= 4) return {geometric_t_values(-10, -3, 8), 0.3, false};
  if (declared_order <= 6) return {geometric_t_values(-3, 0, 7), 0.3, false};
  if (declared_order <= 8) return {geometric_t_values(-3, -1.5, 4), 0.5, true};
  if (declared_order <= 10) return {geometric_t_values(-2.5, -1, 4), 0.5, true};
  if (declared_order <= 12) return {geometric_t_values(-1, 0, 3), 0.5, true};
  return {geometric_t_values(-1.5, -0.5, 3), 0.5, true};
}

inline constexpr double kExtendedPrecisionFloor = 1e-42;

struct CertificationResult {
  std::string label;
  int declared_order = 0;
  std::uint64_t seed = 0;
  double slope = 0.0;
  double tolerance = 0.0;
  bool extended = false;
  bool pass = false;
};

/// Measures the local slope of a two-operator scheme on one random pair and
/// compares it with declared_order + 1. `family`/`k` identify a recursive
/// family member, which the extended-precision path needs.
inline CertificationResult certify_order(const Scheme& s, std::uint64_t seed, char family = 0, int k = -1,
                                         std::size_t d = 3) {
  const MatrixPair pair = random_matrix_pair(seed, d);
  const OrderCertification window = certification_window(s.declared_order);
  CertificationResult r{s.label, s.declared_order, seed, 0.0, window.tolerance, false, false};
  if (window.extended) {
    if (family == 0) {
      throw Error(ErrorKind::precision_floor, "order " + std::to_string(s.declared_order) +
                                                  " needs the extended-precision oracle, which requires a family member");
    }
    std::vector<double> errs;
    for (double t : window.t_values) errs.push_back(family_matrix_error<Extended>(pair, family, k, t));
    r.slope = detail::fit_above_floor(window.t_values, errs, kExtendedPrecisionFloor, s.label);
    r.extended = true;
  } else {
    r.slope = local_order_slope(pair, s, window.t_values);
  }
  r.pass = std::abs(r.slope - (s.declared_order + 1)) <= r.tolerance;
  return r;
}

struct GlobalOrderFit {
  double order = 0.0;
  std::vector<long long> n_used;
  std::vector<double> rmse_used;
};

/// Negated log-log slope of RMSE against n. Only points with RMSE in
/// [1e-9, 1e-1] enter the fit.
inline GlobalOrderFit measure_global_order(const SystemSpec& sys, const Scheme& scheme, double horizon,
                                           const RealState& u0, std::span<const long long> n_values,
                                           const RKOptions& ref_opts = {}) {
  GlobalOrderFit fit;
  for (long long n : n_values) {
    const Trajectory ref = reference_solution(sys, horizon, n, u0, ref_opts);
    const Trajectory run = integrate(sys, scheme, horizon, n, u0);
    const double e = rmse(run, ref);
    if (e >= 1e-9 && e <= 1e-1) {
      fit.n_used.push_back(n);
      fit.rmse_used.push_back(e);
    }
  }
  if (fit.n_used.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "only " + std::to_string(fit.n_used.size()) +
                                                  " step counts give RMSE in [1e-9, 1e-1]");
  }
  std::vector<double> ns(fit.n_used.begin(), fit.n_used.end());
  fit.order = -log_log_slope(ns, fit.rmse_used);
  return fit;
}

inline double empirical_global_order(const SystemSpec& sys, const Scheme& scheme, double horizon,
                                     const RealState& u0, std::span<const long long> n_values,
                                     const RKOptions& ref_opts = {}) {
  return measure_global_order(sys, scheme, horizon, u0, n_values, ref_opts).order;
}

}  // namespace cwsplit
