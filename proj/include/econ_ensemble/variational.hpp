#pragma once

// Maximum-pressure profiles from the calculus-of-variations treatment of the
// pressure functional:
//
//   V(eps) = c1 exp(-alpha - exp(alpha + beta eps)) / beta + c2
//   g(eps) = c3 exp(exp(alpha + beta eps) - alpha) / beta + c4
//
// together with their Euler-Lagrange residuals, the minimum-volume wealth
// cutoff V(eps0) = b, and a discretized stationarity test.
//
// g grows double-exponentially, so derivatives are carried as a mantissa
// times exp(log_scale) and residuals are formed without leaving double range.

#include "econ_ensemble/dos.hpp"
#include "econ_ensemble/errors.hpp"
#include "econ_ensemble/quadrature.hpp"
#include "econ_ensemble/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace econ
{

/// First and second derivative, each equal to exp(log_scale) * mantissa.
struct ProfileDerivatives
{
  double log_scale = 0.0;
  double first = 0.0;
  double second = 0.0;

  /// Adds unscaled derivative contributions (for perturbed profiles).
  ProfileDerivatives plus(double d1, double d2) const
  {
    if (log_scale >= 0.0)
    {
      const double shrink = std::exp(-log_scale);
      return {log_scale, first + d1 * shrink, second + d2 * shrink};
    }
    const double grow = std::exp(log_scale);
    return {0.0, first * grow + d1, second * grow + d2};
  }
};

namespace detail
{
inline double inner_exponential(double alpha, double beta, double eps)
{
  const double inner = alpha + beta * eps;
  if (inner > max_exponent)
    throw OverflowError("exp(alpha + beta*eps) out of range at eps=" + std::to_string(eps));
  return std::exp(inner);
}
}

struct VolumeProfile
{
  double c1;
  double c2;
  double alpha;
  double beta;

  double operator()(double eps) const
  {
    const double u = detail::inner_exponential(alpha, beta, eps);
    return c1 * std::exp(-alpha - u) / beta + c2;
  }

  ProfileDerivatives derivatives(double eps) const
  {
    const double u = detail::inner_exponential(alpha, beta, eps);
    return {-alpha - u, -c1 * u, -c1 * beta * u * (1.0 - u)};
  }
};

inline VolumeProfile optimal_volume_profile(double c1, double c2, double alpha, double beta)
{
  detail::require(std::isfinite(c1) && std::isfinite(c2) && std::isfinite(alpha),
                  "optimal_volume_profile: constants must be finite");
  detail::require(std::isfinite(beta) && beta > 0.0, "optimal_volume_profile: beta must be > 0");
  return {c1, c2, alpha, beta};
}

/// The maximum-pressure DOS family (no cutoff attached).
inline MaxPressureDos optimal_dos_profile(double c3, double c4, double alpha, double beta)
{
  detail::require(std::isfinite(c3) && std::isfinite(c4) && std::isfinite(alpha),
                  "optimal_dos_profile: constants must be finite");
  detail::require(std::isfinite(beta) && beta > 0.0, "optimal_dos_profile: beta must be > 0");
  return {c3, c4, alpha, beta, std::nullopt};
}

/// g(eps); OverflowError once the double exponential leaves double range.
inline double profile_value(const MaxPressureDos& g, double eps)
{
  return detail::max_pressure_shape(g, eps);
}

inline ProfileDerivatives profile_derivatives(const MaxPressureDos& g, double eps)
{
  const double u = detail::inner_exponential(g.alpha, g.beta, eps);
  return {u - g.alpha, g.c3 * u, g.c3 * g.beta * u * (1.0 + u)};
}

namespace detail
{
// prefactor * |t1 - t2| where prefactor = exp(log_prefactor). Reported as an
// absolute value while prefactor * (|t1| + |t2|) <= 1, relative beyond that,
// so closed forms far outside double range are still checkable.
inline double scaled_residual(double log_prefactor, double t1, double t2)
{
  const double size = std::abs(t1) + std::abs(t2);
  if (size == 0.0) return 0.0;
  const double diff = std::abs(t1 - t2);
  if (log_prefactor + std::log(size) <= 0.0) return std::exp(log_prefactor) * diff;
  return diff / size;
}
}

/// Residual of e^{-alpha-beta x} [beta V'(x)(1 - e^{alpha+beta x}) - V''(x)] / beta.
inline double volume_residual(const ProfileDerivatives& d, double alpha, double beta, double x)
{
  const double u = detail::inner_exponential(alpha, beta, x);
  return detail::scaled_residual(d.log_scale - alpha - beta * x - std::log(beta),
                                 beta * d.first * (1.0 - u), d.second);
}

/// Residual of e^{-alpha-beta x} [beta g'(x)(e^{alpha+beta x} + 1) - g''(x)] / beta.
inline double dos_residual(const ProfileDerivatives& d, double alpha, double beta, double x)
{
  const double u = detail::inner_exponential(alpha, beta, x);
  return detail::scaled_residual(d.log_scale - alpha - beta * x - std::log(beta),
                                 beta * d.first * (u + 1.0), d.second);
}

struct EulerLagrangeResidual
{
  double max_abs_residual_v;
  double max_abs_residual_g;
};

/// Maximum residuals over `grid` for arbitrary profiles given as callables
/// eps -> ProfileDerivatives.
template <class VolumeFn, class DosFn>
EulerLagrangeResidual euler_lagrange_residual(const VolumeFn& volume, const DosFn& dos,
                                              double alpha, double beta,
                                              std::span<const double> grid)
{
  detail::require(beta > 0.0, "euler_lagrange_residual: beta must be > 0");
  EulerLagrangeResidual out{0.0, 0.0};
  for (double x : grid)
  {
    detail::require(x >= 0.0, "euler_lagrange_residual: grid points must be >= 0");
    out.max_abs_residual_v =
        std::max(out.max_abs_residual_v, volume_residual(volume(x), alpha, beta, x));
    out.max_abs_residual_g = std::max(out.max_abs_residual_g, dos_residual(dos(x), alpha, beta, x));
  }
  return out;
}

inline EulerLagrangeResidual euler_lagrange_residual(const VolumeProfile& vp,
                                                     const MaxPressureDos& gp,
                                                     std::span<const double> grid)
{
  detail::require(vp.alpha == gp.alpha && vp.beta == gp.beta,
                  "euler_lagrange_residual: profiles must share alpha and beta");
  return euler_lagrange_residual([&](double x) { return vp.derivatives(x); },
                                 [&](double x) { return profile_derivatives(gp, x); }, vp.alpha,
                                 vp.beta, grid);
}

/// The eps0 with V(eps0) = b, by bisection to 1e-12 absolute. Requires c1 > 0
/// and c2 < b <= V(0); NoRootError otherwise.
inline double wealth_cutoff(const VolumeProfile& vp, double b)
{
  detail::require(vp.c1 > 0.0, "wealth_cutoff: c1 must be > 0 for a monotone profile");
  const double v0 = vp(0.0);
  if (b == v0) return 0.0;
  if (!(b > vp.c2 && b < v0))
    throw NoRootError("wealth_cutoff: b=" + std::to_string(b) + " outside (c2, V(0)]");

  auto excess = [&](double eps) {
    // Past the exponent range V has already collapsed onto c2 < b.
    if (vp.alpha + vp.beta * eps > detail::max_exponent) return vp.c2 - b;
    return vp(eps) - b;
  };
  double hi = 1.0;
  while (excess(hi) > 0.0)
  {
    hi *= 2.0;
    if (hi > 1e12) throw NoRootError("wealth_cutoff: could not bracket the root");
  }
  return roots::bisect(excess, 0.0, hi, 1e-12);
}

struct CutoffResult
{
  double eps0;
  double level_mass;
};

/// Integral of g over [0, eps0] (the quasicontinuum total of level weights).
inline double cutoff_level_mass(const MaxPressureDos& gp, double eps0)
{
  detail::require(eps0 >= 0.0, "cutoff_level_mass: eps0 must be >= 0");
  if (eps0 == 0.0) return 0.0;
  profile_value(gp, eps0);  // overflow check at the far end
  return quad::integrate([&](double e) { return profile_value(gp, e); }, 0.0, eps0,
                         {1e-300, 1e-10, 4000})
      .value;
}

inline CutoffResult wealth_cutoff_with_mass(const VolumeProfile& vp, const MaxPressureDos& gp,
                                            double b)
{
  const double eps0 = wealth_cutoff(vp, b);
  return {eps0, cutoff_level_mass(gp, eps0)};
}

/// Two readings of the pressure-functional integrand.
enum class PressureReading
{
  /// V'(eps) [e^{-alpha-beta eps} g'(eps) - beta g(eps)] / beta, the integrand
  /// whose Euler-Lagrange equations are the ones solved by the closed forms.
  Printed,
  /// V'(eps) [g'(eps) - beta g(eps)] e^{-alpha-beta eps} / beta, i.e. V' times
  /// the eps-derivative of g e^{-alpha-beta eps}.
  ProductRule,
};

inline const char* to_string(PressureReading r)
{
  return r == PressureReading::Printed ? "printed" : "product_rule";
}

struct StationarityConfig
{
  double alpha = 1.0;
  double beta = 1.0;
  unsigned perturbations = 8;
  double scale = 0.05;  ///< perturbation amplitude relative to max|V| and max|g|
  std::uint64_t seed = 42;
  PressureReading reading = PressureReading::Printed;
};

struct StationarityReport
{
  /// max over trials of |P(+s) - P(-s)| / (2 s), divided by max|V| max|g|.
  double first_variation;
  /// max over trials of |P(s) - P(0)| and |P(s/2) - P(0)|, same normalization.
  double increment_full;
  double increment_half;
  /// min over trials of increment(s) / increment(s/2); ~4 at a stationary
  /// point, ~2 elsewhere. NaN when no perturbation is applied.
  double reduction_ratio;
};

namespace detail
{

// d/d eps of sampled values, second order on a nonuniform grid.
inline std::vector<double> sampled_derivative(std::span<const double> x, std::span<const double> y)
{
  const std::size_t n = x.size();
  std::vector<double> d(n);
  auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2, double at) {
    // derivative of the quadratic through (x_i0, x_i1, x_i2) evaluated at `at`
    const double a = x[i0], b = x[i1], c = x[i2];
    return y[i0] * ((2 * at - b - c) / ((a - b) * (a - c))) +
           y[i1] * ((2 * at - a - c) / ((b - a) * (b - c))) +
           y[i2] * ((2 * at - a - b) / ((c - a) * (c - b)));
  };
  d[0] = three_point(0, 1, 2, x[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, x[i]);
  d[n - 1] = three_point(n - 3, n - 2, n - 1, x[n - 1]);
  return d;
}

struct Perturbation
{
  // sum_k coeff[k] sin((k+1) pi t), t = (eps - lo) / (hi - lo)
  std::vector<double> coeff;
  double lo;
  double hi;

  double value(double eps) const
  {
    const double t = (eps - lo) / (hi - lo);
    double v = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k)
      v += coeff[k] * std::sin((k + 1) * std::numbers::pi * t);
    return v;
  }
  double slope(double eps) const
  {
    const double t = (eps - lo) / (hi - lo);
    double v = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k)
    {
      const double w = (k + 1) * std::numbers::pi;
      v += coeff[k] * w * std::cos(w * t);
    }
    return v / (hi - lo);
  }
};

inline Perturbation random_perturbation(std::mt19937_64& rng, double lo, double hi)
{
  Perturbation p{std::vector<double>(4), lo, hi};
  for (std::size_t k = 0; k < p.coeff.size(); ++k)
  {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    p.coeff[k] = (2.0 * unit - 1.0) / static_cast<double>(k + 1);
  }
  return p;
}

}

/// Discretized pressure functional integral of L(V', g, g') by the trapezoid rule.
inline double discrete_pressure_functional(std::span<const double> eps,
                                           std::span<const double> volume_slope,
                                           std::span<const double> g,
                                           std::span<const double> g_slope, double alpha,
                                           double beta, PressureReading reading)
{
  double total = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i)
  {
    const double decay = std::exp(-alpha - beta * eps[i]);
    const double integrand =
        reading == PressureReading::Printed
            ? volume_slope[i] * (decay * g_slope[i] - beta * g[i]) / beta
            : volume_slope[i] * (g_slope[i] - beta * g[i]) * decay / beta;
    if (i > 0) total += 0.5 * (eps[i] - eps[i - 1]) * (integrand + previous);
    previous = integrand;
  }
  return total;
}

/// Perturbs (V, g) jointly by random smooth modes vanishing at both grid ends
/// and measures how the discretized pressure functional responds.
/// ConfigurationError for fewer than 16 grid points.
inline StationarityReport stationarity_check(std::span<const DosSample> base_dos,
                                             const VolumeProfile& vp,
                                             const StationarityConfig& config)
{
  const std::size_t n = base_dos.size();
  if (n < 16) throw ConfigurationError("stationarity_check: grid needs at least 16 points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(base_dos[i].eps > base_dos[i - 1].eps))
      throw ConfigurationError("stationarity_check: grid must be strictly increasing");
  detail::require(config.beta > 0.0, "stationarity_check: beta must be > 0");
  detail::require(config.scale >= 0.0, "stationarity_check: scale must be >= 0");

  std::vector<double> eps(n), g(n), volume(n), volume_slope(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    eps[i] = base_dos[i].eps;
    g[i] = base_dos[i].g;
    volume[i] = vp(eps[i]);
    const ProfileDerivatives d = vp.derivatives(eps[i]);
    volume_slope[i] = std::exp(d.log_scale) * d.first;
  }
  const std::vector<double> g_slope = detail::sampled_derivative(eps, g);

  double volume_norm = 0.0, g_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    volume_norm = std::max(volume_norm, std::abs(volume[i]));
    g_norm = std::max(g_norm, std::abs(g[i]));
  }
  const double norm = volume_norm * g_norm;

  StationarityReport report{0.0, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
  if (config.perturbations == 0 || config.scale == 0.0 || norm == 0.0) return report;

  auto functional = [&](const detail::Perturbation& pv, const detail::Perturbation& pg,
                        double s) {
    std::vector<double> vs(n), gs(n), gps(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      vs[i] = volume_slope[i] + s * volume_norm * pv.slope(eps[i]);
      gs[i] = g[i] + s * g_norm * pg.value(eps[i]);
      gps[i] = g_slope[i] + s * g_norm * pg.slope(eps[i]);
    }
    return discrete_pressure_functional(eps, vs, gs, gps, config.alpha, config.beta,
                                        config.reading);
  };

  std::mt19937_64 rng(config.seed);
  const double s = config.scale;
  const double base = functional({{}, eps.front(), eps.back()}, {{}, eps.front(), eps.back()}, 0);
  double min_ratio = std::numeric_limits<double>::infinity();
  for (unsigned t = 0; t < config.perturbations; ++t)
  {
    const auto pv = detail::random_perturbation(rng, eps.front(), eps.back());
    const auto pg = detail::random_perturbation(rng, eps.front(), eps.back());
    const double plus = functional(pv, pg, s);
    const double minus = functional(pv, pg, -s);
    const double half = functional(pv, pg, 0.5 * s);

    const double variation = std::abs(plus - minus) / (2.0 * s) / norm;
    const double full_step = std::abs(plus - base) / norm;
    const double half_step = std::abs(half - base) / norm;
    report.first_variation = std::max(report.first_variation, variation);
    report.increment_full = std::max(report.increment_full, full_step);
    report.increment_half = std::max(report.increment_half, half_step);
    min_ratio = std::min(min_ratio, half_step > 0.0 ? full_step / half_step
                                                    : std::numeric_limits<double>::infinity());
  }
  report.reduction_ratio = min_ratio;
  return report;
}

/// Samples g on `points` evenly spaced nodes over [lo, hi].
inline std::vector<DosSample> sample_profile(const MaxPressureDos& gp, double lo, double hi,
                                             std::size_t points)
{
  detail::require(points >= 2 && hi > lo, "sample_profile: need >= 2 points on a proper range");
  std::vector<DosSample> out(points);
  for (std::size_t i = 0; i < points; ++i)
  {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = {e, profile_value(gp, e)};
  }
  return out;
}

}
