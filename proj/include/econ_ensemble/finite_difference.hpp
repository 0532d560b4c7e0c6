#pragma once

#include <algorithm>
#include <cmath>

namespace econ::fd
{

/// Step used for central differences at x: max(1e-6, 1e-6 |x|).
inline double default_step(double x) { return std::max(1e-6, 1e-6 * std::abs(x)); }

template <class F>
double central(const F& f, double x, double h)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Central difference with one level of Richardson extrapolation (O(h^4)).
template <class F>
double richardson(const F& f, double x, double h)
{
  const double coarse = central(f, x, h);
  const double fine = central(f, x, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

template <class F>
double derivative(const F& f, double x)
{
  return richardson(f, x, default_step(x));
}

}
