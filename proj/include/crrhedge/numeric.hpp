#pragma once

#include <cstdint>
#include <sstream>
#include <type_traits>

#include "crrhedge/errors.hpp"

namespace crrhedge {

/// Largest n for which C(n, k) is computed in exact 64-bit integer
/// arithmetic; C(60, 30) ~ 1.18e17 fits comfortably.
inline constexpr int max_exact_binomial_n = 60;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <typename Real>
std::string str(const Real& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace detail

template <typename Real>
inline constexpr bool is_exact_real_v = !std::is_floating_point_v<Real>;

/// base^n by binary exponentiation; negative n divides (base must be
/// nonzero then). Deterministic for floating point, exact for rationals.
template <typename Real>
Real pow_int(const Real& base, long long n) {
  if (n < 0) return Real(1) / pow_int(base, -n);
  Real acc(1);
  Real b = base;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

/// Exact C(n, k) for 0 <= n <= max_exact_binomial_n.
inline std::uint64_t binomial_exact(int n, int k) {
  if (n < 0 || n > max_exact_binomial_n)
    throw InvalidParams("binomial_exact: n=" + std::to_string(n) + " outside [0, " +
                        std::to_string(max_exact_binomial_n) + "]");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t res = 1;
  // res * (n - k + i) stays below 2^64 for n <= 60: C(60,29)*60 < 3.6e18.
  for (int i = 1; i <= k; ++i) res = res * static_cast<std::uint64_t>(n - k + i) /
                                      static_cast<std::uint64_t>(i);
  return res;
}

/// C(n, k) as Real: exact 64-bit value where it fits, multiplicative
/// recurrence in Real arithmetic above that (stable up to C(1024,512)).
template <typename Real>
Real binomial_coefficient(int n, int k) {
  if (n < 0) throw InvalidParams("binomial_coefficient: negative n");
  if (k < 0 || k > n) return Real(0);
  if (k > n - k) k = n - k;
  if (n <= max_exact_binomial_n) return Real(binomial_exact(n, k));
  // Divide before multiplying: after step i the value is C(n-k+i, i), so
  // every intermediate stays at or below the final coefficient and a
  // representable C(n, k) can never overflow mid-recurrence.
  Real res(1);
  for (int i = 1; i <= k; ++i) res = res / Real(i) * Real(n - k + i);
  return res;
}

/// Compensated (Kahan) accumulator for floating-point Real; plain addition
/// for exact types, where compensation would be a no-op.
template <typename Real>
class Accumulator {
 public:
  void add(const Real& x) {
    if constexpr (std::is_floating_point_v<Real>) {
      Real y = x - comp_;
      Real t = sum_ + y;
      comp_ = (t - sum_) - y;
      sum_ = t;
    } else {
      sum_ += x;
    }
  }

  const Real& total() const noexcept { return sum_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

/// Lossy conversion to double, for reporting and Monte Carlo internals.
template <typename Real>
double to_double(const Real& x) {
  if constexpr (std::is_floating_point_v<Real>)
    return static_cast<double>(x);
  else
    return x.template convert_to<double>();
}

}  // namespace crrhedge
