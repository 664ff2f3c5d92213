#pragma once

// Extended-precision real type for the matrix order oracle: a 45-digit
// binary float from Boost.Multiprecision (header only).

#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cwsplit/scheme.hpp"

namespace cwsplit {

using Extended = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<45>,
                                               boost::multiprecision::et_off>;

template <>
struct RealOps<Extended> {
  static Extended sin(const Extended& x) { return boost::multiprecision::sin(x); }
  static Extended cos(const Extended& x) { return boost::multiprecision::cos(x); }
  static Extended pow(const Extended& x, const Extended& y) { return boost::multiprecision::pow(x, y); }
  static Extended sqrt(const Extended& x) { return boost::multiprecision::sqrt(x); }
  static Extended ldexp(const Extended& x, int e) { return boost::multiprecision::ldexp(x, e); }
  static Extended epsilon() { return std::numeric_limits<Extended>::epsilon(); }
  static Extended pi() { return boost::math::constants::pi<Extended>(); }
};

}  // namespace cwsplit
