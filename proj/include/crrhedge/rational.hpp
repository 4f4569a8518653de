#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace crrhedge {

/// Arbitrary-precision rational, the exact-arithmetic instantiation of the
/// Real template parameter. Every pricing identity that holds with real
/// numbers holds bit-for-bit in this mode.
using Rational = boost::multiprecision::cpp_rational;

}  // namespace crrhedge
