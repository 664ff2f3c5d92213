#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cwsplit/error.hpp"

namespace cwsplit {

using Complex = std::complex<double>;

// One frozen-flow application: advance coordinate `coord` (1-based) by the
// complex time coeff * h while every other coordinate is held fixed.
struct Factor {
  int coord = 1;
  Complex coeff{1.0, 0.0};

  friend bool operator==(const Factor&, const Factor&) = default;
};

// A splitting scheme as an explicit factor list in chronological order:
// factors[0] is applied to the state first.
struct Scheme {
  int dim = 1;
  std::vector<Factor> factors;
  int declared_order = 1;
  std::string label;

  std::size_t size() const noexcept { return factors.size(); }
};

namespace detail {

inline constexpr double kMergeDropThreshold = 1e-15;

inline void require_dimension(int n, const char* what) {
  if (n < 1) throw Error(ErrorKind::invalid_dimension, std::string(what) + ": N must be >= 1");
}

inline void check_factor(const Factor& f, int dim) {
  if (f.coord < 1 || f.coord > dim) {
    throw Error(ErrorKind::invalid_argument,
                "factor coordinate " + std::to_string(f.coord) + " outside 1.." + std::to_string(dim));
  }
  if (!std::isfinite(f.coeff.real()) || !std::isfinite(f.coeff.imag())) {
    throw Error(ErrorKind::invalid_argument, "factor coefficient is not finite");
  }
}

}  // namespace detail

inline void validate(const Scheme& s) {
  detail::require_dimension(s.dim, "scheme");
  for (const Factor& f : s.factors) detail::check_factor(f, s.dim);
}

/// Combines chronologically adjacent factors acting on the same coordinate.
/// Factors whose merged coefficient falls below 1e-15 in magnitude vanish, and
/// their neighbours are then merged in turn, so the result is fully reduced.
inline Scheme merge_adjacent(const Scheme& s) {
  Scheme out{s.dim, {}, s.declared_order, s.label};
  out.factors.reserve(s.factors.size());
  for (const Factor& f : s.factors) {
    if (!out.factors.empty() && out.factors.back().coord == f.coord) {
      out.factors.back().coeff += f.coeff;
    } else {
      out.factors.push_back(f);
    }
    if (std::abs(out.factors.back().coeff) < detail::kMergeDropThreshold) out.factors.pop_back();
  }
  return out;
}

/// Adjacent-coordinate-distinct form with every coordinate in range.
inline bool is_normalized(const Scheme& s) {
  for (std::size_t j = 0; j < s.factors.size(); ++j) {
    if (s.factors[j].coord < 1 || s.factors[j].coord > s.dim) return false;
    if (j > 0 && s.factors[j - 1].coord == s.factors[j].coord) return false;
  }
  return true;
}

/// Sum of coefficients per coordinate; entry i-1 belongs to coordinate i.
inline std::vector<Complex> coefficient_sums(const Scheme& s) {
  std::vector<Complex> sums(static_cast<std::size_t>(std::max(s.dim, 0)), Complex{});
  for (const Factor& f : s.factors) {
    if (f.coord >= 1 && f.coord <= s.dim) sums[static_cast<std::size_t>(f.coord - 1)] += f.coeff;
  }
  return sums;
}

/// Number of factors acting on each coordinate; entry i-1 belongs to coordinate i.
inline std::vector<std::size_t> multiplicities(const Scheme& s) {
  std::vector<std::size_t> m(static_cast<std::size_t>(std::max(s.dim, 0)), 0);
  for (const Factor& f : s.factors) {
    if (f.coord >= 1 && f.coord <= s.dim) ++m[static_cast<std::size_t>(f.coord - 1)];
  }
  return m;
}

inline bool is_two_operator(const Scheme& s) { return s.dim == 2; }

/// First-order product, one full step per coordinate. In two dimensions
/// coordinate 1 goes first; from three dimensions on the order is N, ..., 1.
inline Scheme lie_trotter(int n) {
  detail::require_dimension(n, "lie_trotter");
  Scheme s{n, {}, 1, "lie-trotter"};
  if (n <= 2) {
    for (int i = 1; i <= n; ++i) s.factors.push_back({i, 1.0});
  } else {
    for (int i = n; i >= 1; --i) s.factors.push_back({i, 1.0});
  }
  return s;
}

/// Symmetric product with half steps around a central full step. Two
/// dimensions keep coordinate 1 outermost; from three dimensions on,
/// coordinate N is outermost and coordinate 1 takes the full step.
inline Scheme strang(int n) {
  detail::require_dimension(n, "strang");
  Scheme s{n, {}, 2, "strang"};
  if (n == 1) {
    s.factors.push_back({1, 1.0});
  } else if (n == 2) {
    s.factors = {{1, 0.5}, {2, 1.0}, {1, 0.5}};
  } else {
    for (int i = n; i >= 2; --i) s.factors.push_back({i, 0.5});
    s.factors.push_back({1, 1.0});
    for (int i = 2; i <= n; ++i) s.factors.push_back({i, 0.5});
  }
  return s;
}

// Real-number operations used by the coefficient formulas; specialise for
// extended-precision types.
template <class R>
struct RealOps {
  static R sin(R x) { return std::sin(x); }
  static R cos(R x) { return std::cos(x); }
  static R pow(R x, R y) { return std::pow(x, y); }
  static R sqrt(R x) { return std::sqrt(x); }
  static R ldexp(R x, int e) { return std::ldexp(x, e); }
  static R epsilon() { return std::numeric_limits<R>::epsilon(); }
  static R pi() { return std::numbers::pi_v<R>; }
};

template <class R>
std::complex<R> u_coefficient_as(int k) {
  using Ops = RealOps<R>;
  const R theta = Ops::pi() / R(k + 2);
  return {R(1) / R(2), Ops::sin(theta) / (R(2) + R(2) * Ops::cos(theta))};
}

// Root of 2a^m + (1-2a)^m = 0 with m = 2k+1, the condition that lifts a
// symmetric order-2k method to order 2k+2 under the triple jump.
template <class R>
std::complex<R> w_coefficient_as(int k) {
  using Ops = RealOps<R>;
  const R m = R(2 * k + 1);
  const std::complex<R> e{Ops::cos(Ops::pi() / m), Ops::sin(Ops::pi() / m)};
  return e / (R(2) * e + Ops::pow(R(2), R(1) / m));
}

template <class R>
std::complex<R> z_coefficient_as(int k) {
  using Ops = RealOps<R>;
  const R theta = Ops::pi() / R(2 * k + 1);
  return {R(1) / R(4), Ops::sin(theta) / (R(4) + R(4) * Ops::cos(theta))};
}

inline Complex u_coefficient(int k) { return u_coefficient_as<double>(k); }
inline Complex w_coefficient(int k) { return w_coefficient_as<double>(k); }
inline Complex z_coefficient(int k) { return z_coefficient_as<double>(k); }

template <class R>
struct BasicFactor {
  int coord;
  std::complex<R> coeff;
};

inline int family_max_k(char family) {
  switch (family) {
    case 'u': return 4;
    case 'w': return 3;
    case 'z': return 6;
    default: throw Error(ErrorKind::invalid_argument, std::string("unknown scheme family '") + family + "'");
  }
}

inline int family_order(char family, int k) { return family == 'u' ? k + 2 : 2 * k + 2; }

/// Merged factor list of U_[k], W_[k] or Z_[k] computed in precision R.
/// Each level composes copies of the previous level scaled by the level
/// coefficients, then merges adjacent factors on the same operator:
///   U_[k](t) = U_[k-1](conj(a) t) U_[k-1](a t)
///   W_[k](t) = W_[k-1](a t) W_[k-1]((1-2a) t) W_[k-1](a t)
///   Z_[k](t) = Z_[k-1](a t) Z_[k-1](conj(a) t) Z_[k-1](conj(a) t) Z_[k-1](a t)
template <class R>
std::vector<BasicFactor<R>> family_factors(char family, int k) {
  const int max_k = family_max_k(family);
  if (k < 0 || k > max_k) {
    throw Error(ErrorKind::unsupported_order,
                std::string(1, family) + "_family supports 0 <= k <= " + std::to_string(max_k));
  }
  using C = std::complex<R>;
  std::vector<BasicFactor<R>> s{{2, C(R(1) / R(2))}, {1, C(R(1))}, {2, C(R(1) / R(2))}};
  for (int j = 1; j <= k; ++j) {
    std::vector<C> scales;
    switch (family) {
      case 'u': {
        const C a = u_coefficient_as<R>(j);
        scales = {std::conj(a), a};
        break;
      }
      case 'w': {
        const C a = w_coefficient_as<R>(j);
        scales = {a, C(R(1)) - R(2) * a, a};
        break;
      }
      default: {
        const C a = z_coefficient_as<R>(j);
        scales = {a, std::conj(a), std::conj(a), a};
        break;
      }
    }
    std::vector<BasicFactor<R>> next;
    next.reserve(s.size() * scales.size());
    for (const C& c : scales) {
      for (const BasicFactor<R>& f : s) {
        if (!next.empty() && next.back().coord == f.coord) {
          next.back().coeff += f.coeff * c;
        } else {
          next.push_back({f.coord, f.coeff * c});
        }
      }
    }
    s = std::move(next);
  }
  return s;
}

inline Scheme family_scheme(char family, int k) {
  Scheme s{2, {}, 0, std::string(1, family) + std::to_string(k)};
  for (const BasicFactor<double>& f : family_factors<double>(family, k)) s.factors.push_back({f.coord, f.coeff});
  s.declared_order = family_order(family, k);
  return merge_adjacent(s);
}

/// U_[k], order k+2, 2^{k+1}+1 factors (0 <= k <= 4).
inline Scheme u_family(int k) { return family_scheme('u', k); }

/// W_[k], order 2k+2, 2*3^k+1 factors (0 <= k <= 3).
inline Scheme w_family(int k) { return family_scheme('w', k); }

/// Z_[k], order 2k+2, 2*4^k+1 factors (0 <= k <= 6).
inline Scheme z_family(int k) { return family_scheme('z', k); }

/// Replaces every factor (old, c) of `s` by the two-operator `base` scaled by c,
/// with base coordinate 1 acting on `old` and base coordinate 2 on `new_coord`.
inline Scheme substitute_coordinate(const Scheme& s, const Scheme& base, int old, int new_coord) {
  validate(s);
  validate(base);
  if (!is_two_operator(base)) {
    throw Error(ErrorKind::invalid_argument, "substitution base must be a two-operator scheme");
  }
  if (new_coord != s.dim + 1) {
    throw Error(ErrorKind::invalid_argument, "new coordinate must be dim + 1");
  }
  const bool present = std::any_of(s.factors.begin(), s.factors.end(),
                                   [old](const Factor& f) { return f.coord == old; });
  if (!present) {
    throw Error(ErrorKind::invalid_argument,
                "coordinate " + std::to_string(old) + " does not occur in the scheme");
  }

  Scheme out{s.dim + 1, {}, s.declared_order, s.label};
  out.factors.reserve(s.factors.size() + base.factors.size() * s.factors.size());
  for (const Factor& f : s.factors) {
    if (f.coord != old) {
      out.factors.push_back(f);
      continue;
    }
    for (const Factor& b : base.factors) {
      out.factors.push_back({b.coord == 1 ? old : new_coord, b.coeff * f.coeff});
    }
  }
  return merge_adjacent(out);
}

/// Grows a two-operator base to N coordinates by repeated substitution into
/// the coordinate with the smallest multiplicity (lowest index on ties).
inline Scheme expand_to_dimension(const Scheme& base, int n) {
  validate(base);
  if (!is_two_operator(base)) {
    throw Error(ErrorKind::invalid_argument, "expansion base must be a two-operator scheme");
  }
  if (n < 2) throw Error(ErrorKind::invalid_dimension, "expand_to_dimension: N must be >= 2");
  if (base.factors.size() % 2 == 0) {
    throw Error(ErrorKind::invalid_argument, "expansion base must have an odd factor count");
  }

  Scheme s = base;
  for (int m = 3; m <= n; ++m) {
    const std::vector<std::size_t> mult = multiplicities(s);
    const auto smallest = std::min_element(mult.begin(), mult.end());
    const int old = static_cast<int>(smallest - mult.begin()) + 1;
    s = substitute_coordinate(s, base, old, m);
  }
  return s;
}

/// Factor count of the recursive coordinate substitution: start from the
/// multiplicities [(q-1)/2, (q+1)/2] and, for each added coordinate, replace
/// the smallest entry r by r(q-1)/2 and r(q+1)/2.
inline std::uint64_t count_factors(int n, std::uint64_t q) {
  if (n < 2) throw Error(ErrorKind::invalid_dimension, "count_factors: N must be >= 2");
  if (q % 2 == 0 || q < 3) throw Error(ErrorKind::invalid_argument, "count_factors: q must be odd and >= 3");

  const std::uint64_t a = (q - 1) / 2;
  const std::uint64_t b = (q + 1) / 2;
  std::vector<std::uint64_t> mult{a, b};
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  for (int m = 3; m <= n; ++m) {
    std::sort(mult.begin(), mult.end());
    const std::uint64_t r = mult.front();
    mult.erase(mult.begin());
    if (r > kMax / b) throw Error(ErrorKind::overflow, "count_factors: factor count exceeds 64 bits");
    mult.push_back(a * r);
    mult.push_back(b * r);
  }
  std::uint64_t total = 0;
  for (std::uint64_t v : mult) {
    if (total > kMax - v) throw Error(ErrorKind::overflow, "count_factors: factor count exceeds 64 bits");
    total += v;
  }
  return total;
}

}  // namespace cwsplit
