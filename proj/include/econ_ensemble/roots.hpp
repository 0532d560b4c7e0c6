#pragma once

#include "econ_ensemble/errors.hpp"

#include <cmath>

namespace econ::roots
{

/// Bisection for f(x) = 0 on [lo, hi]; f(lo) and f(hi) must not share a sign.
/// Stops once the bracket is narrower than abs_tol or cannot shrink further.
template <class F>
double bisect(const F& f, double lo, double hi, double abs_tol = 1e-12)
{
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw NoRootError("bisect: interval does not bracket a root");

  while (hi - lo > abs_tol)
  {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo))
    {
      lo = mid;
      f_lo = f_mid;
    }
    else
    {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}
