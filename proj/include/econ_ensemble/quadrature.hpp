#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite and
// semi-infinite intervals.

#include "econ_ensemble/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

namespace econ::quad
{

struct Tolerance
{
  double absolute = 1e-12;
  double relative = 1e-10;
  std::size_t max_intervals = 4000;
};

struct Result
{
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

namespace detail
{

// Kronrod abscissae; odd indices are the embedded Gauss points.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kronrod_weights[7] * fc;
  double gauss = gauss_weights[3] * fc;
  for (std::size_t i = 0; i < 7; ++i)
  {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}

/// Integrates f over [a, b]. Throws NumericalError if the tolerance cannot be
/// met within `tol.max_intervals` panels or the integrand is not finite.
template <class F>
Result integrate(const F& f, double a, double b, const Tolerance& tol = {})
{
  if (a == b) return {};
  if (!(a < b)) throw ParameterError("quad::integrate: require a < b");

  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gk15(f, a, b));
  double total = panels.top().value;
  double error = panels.top().error;

  while (error > std::max(tol.absolute, tol.relative * std::abs(total)))
  {
    if (!std::isfinite(total))
      throw NumericalError("quad::integrate: non-finite integrand");
    if (panels.size() >= tol.max_intervals)
      throw NumericalError("quad::integrate: no convergence, error estimate " +
                           std::to_string(error));
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw NumericalError("quad::integrate: interval underflow");
    const detail::Panel left = detail::gk15(f, worst.a, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  if (!std::isfinite(total)) throw NumericalError("quad::integrate: non-finite integrand");

  // Re-sum to shed the drift of the running updates.
  Result out;
  out.intervals = panels.size();
  while (!panels.empty())
  {
    out.value += panels.top().value;
    out.error += panels.top().error;
    panels.pop();
  }
  return out;
}

/// Integrates f over [a, inf) through the map x = a + t/(1-t).
template <class F>
Result integrate_to_infinity(const F& f, double a, const Tolerance& tol = {})
{
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    const double x = a + t / s;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, tol);
}

/// Sum of panel-wise integrals over consecutive breakpoints; use when f has
/// kinks at known locations.
template <class F>
Result integrate_piecewise(const F& f, const std::vector<double>& breaks, const Tolerance& tol = {})
{
  Result out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
  {
    const Result r = integrate(f, breaks[i], breaks[i + 1], tol);
    out.value += r.value;
    out.error += r.error;
    out.intervals += r.intervals;
  }
  return out;
}

}
