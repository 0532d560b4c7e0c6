#pragma once

// Grand partition function and macroscopic observables.
//
//   lnZ = integral_0^inf g(eps) exp(-alpha - beta eps) d eps
//   U   = -d lnZ / d beta
//   N   = -d lnZ / d alpha  (= lnZ, since lnZ carries the factor exp(-alpha))
//   p   = lnZ / (beta V) for g proportional to V, 0 for fixed g
//
// The parabolic DOS has closed forms; everything else goes through adaptive
// quadrature.

#include "econ_ensemble/dos.hpp"
#include "econ_ensemble/errors.hpp"
#include "econ_ensemble/finite_difference.hpp"
#include "econ_ensemble/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace econ
{

struct Observables
{
  double ln_z;
  double wealth_u;
  double population_n;
  double pressure_p;
  EnsembleParams params;
};

enum class WealthMethod
{
  Auto,              ///< closed form for parabolic DOS, direct integral otherwise
  DirectIntegral,    ///< integral of eps g(eps) exp(-alpha - beta eps)
  FiniteDifference,  ///< Richardson central difference of lnZ in beta
};

namespace detail
{

inline const quad::Tolerance ensemble_tolerance{1e-12, 1e-10, 4000};

// Below this s = beta*eps_star the closed forms switch to their power series.
inline constexpr double series_threshold = 1.0;

// h(s) = s - 2 + (s + 2) e^{-s} = sum_{n>=3} (-1)^{n+1} (n-2) s^n / n!
inline double parabolic_h(double s)
{
  if (s >= series_threshold) return s - 2.0 + (s + 2.0) * std::exp(-s);
  double term = s * s * s / 6.0;  // s^n / n!
  double sum = 0.0;
  for (int n = 3; n < 40; ++n)
  {
    const double contribution = (n % 2 == 0 ? -1.0 : 1.0) * (n - 2) * term;
    sum += contribution;
    if (std::abs(contribution) <= 1e-18 * std::abs(sum)) break;
    term *= s / (n + 1);
  }
  return sum;
}

// k(s) = 2s - 6 + e^{-s} (s^2 + 4s + 6) = sum_{n>=4} (-1)^n (n-2)(n-3) s^n / n!
inline double parabolic_k(double s)
{
  if (s >= series_threshold) return 2.0 * s - 6.0 + (s * s + 4.0 * s + 6.0) * std::exp(-s);
  double term = s * s * s * s / 24.0;
  double sum = 0.0;
  for (int n = 4; n < 40; ++n)
  {
    const double contribution = (n % 2 == 0 ? 1.0 : -1.0) * (n - 2) * (n - 3) * term;
    sum += contribution;
    if (std::abs(contribution) <= 1e-18 * std::abs(sum)) break;
    term *= s / (n + 1);
  }
  return sum;
}

inline void require_integrable(const DensityOfStates& dos)
{
  if (!validate_dos(dos).structurally_sound())
    throw ParameterError("DOS grid must be strictly increasing and start at eps = 0");
}

/// integral of eps^power g(eps) exp(-beta eps), without the exp(-alpha) factor.
inline double moment_without_alpha(const DensityOfStates& dos, const EnsembleParams& params,
                                   int power)
{
  require_integrable(dos);
  const double beta = params.beta();
  const double volume = params.volume();
  auto integrand = [&](double eps) {
    const double g = evaluate_dos(dos, eps, volume);
    if (g == 0.0) return 0.0;
    return (power == 0 ? 1.0 : std::pow(eps, power)) * g * std::exp(-beta * eps);
  };

  if (const auto* t = dos.as<TabulatedDos>())
  {
    std::vector<double> breaks;
    breaks.reserve(t->samples.size());
    for (const auto& s : t->samples) breaks.push_back(s.eps);
    return quad::integrate_piecewise(integrand, breaks, ensemble_tolerance).value;
  }
  if (const auto upper = dos.support_max())
    return quad::integrate(integrand, 0.0, *upper, ensemble_tolerance).value;

  const auto* m = dos.as<MaxPressureDos>();
  if (m->c3 != 0.0)
    throw NumericalError("lnZ diverges: max-pressure DOS with c3 != 0 needs a wealth cutoff");
  return quad::integrate_to_infinity(integrand, 0.0, ensemble_tolerance).value;
}

}

/// lnZ by adaptive quadrature for every DOS kind (the oracle route for the
/// parabolic closed form).
inline double ln_grand_partition_quadrature(const DensityOfStates& dos,
                                            const EnsembleParams& params)
{
  return std::exp(-params.alpha()) * detail::moment_without_alpha(dos, params, 0);
}

/// Closed-form lnZ of the parabolic DOS:
/// C V e^{-alpha - s} (s - 2 e^s + s e^s + 2) / beta^3, s = beta eps_star.
inline double parabolic_ln_z(const ParabolicDos& p, const EnsembleParams& params)
{
  const double beta = params.beta();
  const double s = beta * p.eps_star;
  return p.c * params.volume() * std::exp(-params.alpha()) * detail::parabolic_h(s) /
         (beta * beta * beta);
}

/// Closed-form U of the parabolic DOS:
/// C V e^{-alpha - s} (4s - 6 e^s + s^2 + 2 s e^s + 6) / beta^4.
inline double parabolic_wealth(const ParabolicDos& p, const EnsembleParams& params)
{
  const double beta = params.beta();
  const double s = beta * p.eps_star;
  const double b2 = beta * beta;
  return p.c * params.volume() * std::exp(-params.alpha()) * detail::parabolic_k(s) / (b2 * b2);
}

inline double ln_grand_partition(const DensityOfStates& dos, const EnsembleParams& params)
{
  if (const auto* p = dos.as<ParabolicDos>()) return parabolic_ln_z(*p, params);
  return ln_grand_partition_quadrature(dos, params);
}

inline double wealth(const DensityOfStates& dos, const EnsembleParams& params,
                     WealthMethod method = WealthMethod::Auto)
{
  switch (method)
  {
    case WealthMethod::Auto:
      if (const auto* p = dos.as<ParabolicDos>()) return parabolic_wealth(*p, params);
      [[fallthrough]];
    case WealthMethod::DirectIntegral:
      return std::exp(-params.alpha()) * detail::moment_without_alpha(dos, params, 1);
    case WealthMethod::FiniteDifference:
    {
      const double beta = params.beta();
      const double h = std::min(fd::default_step(beta), 0.25 * beta);
      auto ln_z = [&](double b) { return ln_grand_partition(dos, params.with_beta(b)); };
      return -fd::richardson(ln_z, beta, h);
    }
  }
  return 0.0;
}

/// N = lnZ exactly, by the exp(-alpha) factorization.
inline double population(const DensityOfStates& dos, const EnsembleParams& params)
{
  return ln_grand_partition(dos, params);
}

/// -d lnZ / d alpha by Richardson central difference.
inline double population_finite_difference(const DensityOfStates& dos, const EnsembleParams& params)
{
  auto ln_z = [&](double a) { return ln_grand_partition(dos, params.with_alpha(a)); };
  return -fd::derivative(ln_z, params.alpha());
}

/// p = +lnZ/(beta V) for proportional coupling (the positive production
/// efficiency), 0 for fixed coupling. ContractError if coupling is undeclared.
inline double pressure(const DensityOfStates& dos, const EnsembleParams& params)
{
  const auto coupling = dos.volume_coupling();
  if (!coupling) throw ContractError("pressure: DOS has no declared volume coupling");
  if (*coupling == VolumeCoupling::Fixed) return 0.0;
  return ln_grand_partition(dos, params) / (params.beta() * params.volume());
}

/// -(1/beta) d lnZ / dV evaluated by finite difference in V. For g ~ V this is
/// the negative of pressure(); reported alongside it in verbose output.
inline double pressure_volume_derivative(const DensityOfStates& dos, const EnsembleParams& params)
{
  if (!dos.volume_coupling()) throw ContractError("pressure: DOS has no declared volume coupling");
  const double v = params.volume();
  const double h = std::min(fd::default_step(v), 0.25 * v);
  auto ln_z = [&](double vol) { return ln_grand_partition(dos, params.with_volume(vol)); };
  return -fd::richardson(ln_z, v, h) / params.beta();
}

inline Observables observe(const DensityOfStates& dos, const EnsembleParams& params,
                           WealthMethod method = WealthMethod::Auto)
{
  const double ln_z = ln_grand_partition(dos, params);
  double p = 0.0;
  if (!dos.volume_coupling()) throw ContractError("pressure: DOS has no declared volume coupling");
  if (*dos.volume_coupling() == VolumeCoupling::Proportional)
    p = ln_z / (params.beta() * params.volume());
  return {ln_z, wealth(dos, params, method), ln_z, p, params};
}

/// P(E_s, N_s) = exp(-alpha N_s - beta E_s) / Z, with Z given as ln Z.
inline double state_probability(double wealth_e, long long count_n, const EnsembleParams& params,
                                double ln_z)
{
  detail::require(wealth_e >= 0.0, "state_probability: E_s must be >= 0");
  detail::require(count_n >= 0, "state_probability: N_s must be >= 0");
  return std::exp(-params.alpha() * static_cast<double>(count_n) - params.beta() * wealth_e -
                  ln_z);
}

struct SweepRow
{
  double temperature;
  double ln_z;
  double wealth_u;
  double population_n;
  double pressure_p;
};

struct SweepTable
{
  std::vector<SweepRow> rows;
};

/// Evaluates the observables at `steps` evenly spaced temperatures in
/// [t_min, t_max]. Rows are computed on up to `threads` workers; the table
/// does not depend on the worker count.
inline SweepTable sweep_temperature(const DensityOfStates& dos, double alpha, double t_min,
                                    double t_max, std::size_t steps, double volume = 1.0,
                                    unsigned threads = 1)
{
  detail::require(t_min > 0.0 && std::isfinite(t_max), "sweep: t_min must be > 0");
  detail::require(steps >= 1, "sweep: steps must be >= 1");
  detail::require(steps == 1 || t_min < t_max, "sweep: require t_min < t_max");

  std::vector<SweepRow> rows(steps);
  std::vector<std::exception_ptr> failures(steps);
  auto temperature_at = [&](std::size_t i) {
    if (steps == 1) return t_min;
    if (i + 1 == steps) return t_max;
    return t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < steps; i += stride)
    {
      const double t = temperature_at(i);
      try
      {
        const Observables o = observe(dos, EnsembleParams::from_temperature(alpha, t, volume));
        rows[i] = {t, o.ln_z, o.wealth_u, o.population_n, o.pressure_p};
      }
      catch (...)
      {
        failures[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, steps);
  if (workers == 1)
    work(0, 1);
  else
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  for (std::size_t i = 0; i < steps; ++i)
  {
    if (!failures[i]) continue;
    try
    {
      std::rethrow_exception(failures[i]);
    }
    catch (const NumericalError& e)
    {
      throw NumericalError(std::string(e.what()) + " (sweep point T=" +
                           std::to_string(temperature_at(i)) + ")");
    }
  }
  return {std::move(rows)};
}

}
