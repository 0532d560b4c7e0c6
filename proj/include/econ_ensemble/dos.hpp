#pragma once

// Density-of-states objects and the (alpha, beta, V) ensemble parameters.
//
// alpha = 1/mu is the reciprocal economic potential, beta = 1/T the
// reciprocal economic temperature and V the economic volume. All quantities
// are dimensionless.

#include "econ_ensemble/errors.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace econ
{

class EnsembleParams
{
public:
  /// Throws ParameterError unless beta > 0 and volume > 0 (alpha is any finite real).
  EnsembleParams(double alpha, double beta, double volume = 1.0)
    : alpha_(alpha), beta_(beta), volume_(volume)
  {
    detail::require(std::isfinite(alpha), "EnsembleParams: alpha must be finite");
    detail::require(std::isfinite(beta) && beta > 0.0, "EnsembleParams: beta must be > 0");
    detail::require(std::isfinite(volume) && volume > 0.0, "EnsembleParams: volume must be > 0");
  }

  static EnsembleParams from_temperature(double alpha, double temperature, double volume = 1.0)
  {
    detail::require(std::isfinite(temperature) && temperature > 0.0,
                    "EnsembleParams: temperature must be > 0");
    return {alpha, 1.0 / temperature, volume};
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double volume() const { return volume_; }
  double temperature() const { return 1.0 / beta_; }
  /// mu = 1/alpha; infinite when alpha == 0.
  double potential() const { return 1.0 / alpha_; }

  EnsembleParams with_alpha(double a) const { return {a, beta_, volume_}; }
  EnsembleParams with_beta(double b) const { return {alpha_, b, volume_}; }
  EnsembleParams with_volume(double v) const { return {alpha_, beta_, v}; }

  bool operator==(const EnsembleParams&) const = default;

private:
  double alpha_;
  double beta_;
  double volume_;
};

enum class VolumeCoupling
{
  Proportional,  ///< g scales linearly with V
  Fixed          ///< g independent of V
};

/// g(eps) = -C V eps (eps - eps_star) on [0, eps_star].
struct ParabolicDos
{
  double c;
  double eps_star;
};

/// Maximum-pressure family g(eps) = c3 exp(exp(alpha + beta eps) - alpha) / beta + c4.
/// `support_max`, when set, is the wealth cutoff beyond which g vanishes.
struct MaxPressureDos
{
  double c3;
  double c4;
  double alpha;
  double beta;
  std::optional<double> support_max;
};

struct DosSample
{
  double eps;
  double g;
};

/// Piecewise-linear interpolant of the samples; zero outside their range.
struct TabulatedDos
{
  std::vector<DosSample> samples;
};

namespace detail
{
// Largest admissible natural-log exponent before exp() is treated as overflow.
inline constexpr double max_exponent = 700.0;

inline double max_pressure_shape(const MaxPressureDos& d, double eps)
{
  const double inner = d.alpha + d.beta * eps;
  if (inner > max_exponent)
    throw OverflowError("max-pressure DOS: exp(alpha + beta*eps) out of range at eps=" +
                        std::to_string(eps));
  const double outer = std::exp(inner) - d.alpha;
  if (outer > max_exponent)
    throw OverflowError("max-pressure DOS: g overflows at eps=" + std::to_string(eps));
  return d.c3 * std::exp(outer) / d.beta + d.c4;
}
}

class DensityOfStates
{
public:
  using Kind = std::variant<ParabolicDos, MaxPressureDos, TabulatedDos>;

  static DensityOfStates parabolic(double c, double eps_star)
  {
    detail::require(std::isfinite(c) && c > 0.0, "parabolic DOS: C must be > 0");
    detail::require(std::isfinite(eps_star) && eps_star > 0.0,
                    "parabolic DOS: eps_star must be > 0");
    return DensityOfStates(ParabolicDos{c, eps_star}, VolumeCoupling::Proportional);
  }

  static DensityOfStates max_pressure(double c3, double c4, double alpha, double beta,
                                      std::optional<VolumeCoupling> coupling,
                                      std::optional<double> support_max = std::nullopt)
  {
    detail::require(std::isfinite(c3) && std::isfinite(c4) && std::isfinite(alpha),
                    "max-pressure DOS: constants must be finite");
    detail::require(std::isfinite(beta) && beta > 0.0, "max-pressure DOS: beta must be > 0");
    if (support_max)
      detail::require(std::isfinite(*support_max) && *support_max >= 0.0,
                      "max-pressure DOS: support_max must be >= 0");
    return DensityOfStates(MaxPressureDos{c3, c4, alpha, beta, support_max}, coupling);
  }

  /// Accepts any finite samples; boundary and ordering problems are reported
  /// by validate_dos() and rejected by the integrals.
  static DensityOfStates tabulated(std::vector<DosSample> samples,
                                   std::optional<VolumeCoupling> coupling)
  {
    detail::require(!samples.empty(), "tabulated DOS: need at least one sample");
    for (const auto& s : samples)
      detail::require(std::isfinite(s.eps) && std::isfinite(s.g),
                      "tabulated DOS: samples must be finite");
    return DensityOfStates(TabulatedDos{std::move(samples)}, coupling);
  }

  const Kind& kind() const { return kind_; }
  std::optional<VolumeCoupling> volume_coupling() const { return coupling_; }

  template <class T>
  const T* as() const
  {
    return std::get_if<T>(&kind_);
  }

  /// Upper end of the support, or nullopt when unbounded.
  std::optional<double> support_max() const
  {
    if (const auto* p = as<ParabolicDos>()) return p->eps_star;
    if (const auto* m = as<MaxPressureDos>()) return m->support_max;
    return std::get<TabulatedDos>(kind_).samples.back().eps;
  }

private:
  DensityOfStates(Kind kind, std::optional<VolumeCoupling> coupling)
    : kind_(std::move(kind)), coupling_(coupling)
  {
  }

  Kind kind_;
  std::optional<VolumeCoupling> coupling_;
};

inline DensityOfStates make_parabolic_dos(double c, double eps_star)
{
  return DensityOfStates::parabolic(c, eps_star);
}

/// g(eps) at the given volume. Throws ParameterError for eps < 0, and
/// OverflowError where the max-pressure profile leaves double range.
inline double evaluate_dos(const DensityOfStates& dos, double eps, double volume)
{
  detail::require(eps >= 0.0, "evaluate_dos: eps must be >= 0");
  detail::require(volume > 0.0, "evaluate_dos: volume must be > 0");
  const double scale = dos.volume_coupling() == VolumeCoupling::Proportional ? volume : 1.0;

  if (const auto* p = dos.as<ParabolicDos>())
  {
    if (eps > p->eps_star) return 0.0;
    return p->c * volume * eps * (p->eps_star - eps);
  }
  if (const auto* m = dos.as<MaxPressureDos>())
  {
    if (m->support_max && eps > *m->support_max) return 0.0;
    if (m->c3 == 0.0) return scale * m->c4;
    return scale * detail::max_pressure_shape(*m, eps);
  }

  const auto& s = dos.as<TabulatedDos>()->samples;
  if (eps < s.front().eps || eps > s.back().eps) return 0.0;
  if (s.size() == 1) return scale * s.front().g;
  std::size_t lo = 0, hi = s.size() - 1;
  while (hi - lo > 1)
  {
    const std::size_t mid = (lo + hi) / 2;
    (s[mid].eps <= eps ? lo : hi) = mid;
  }
  const double t = (eps - s[lo].eps) / (s[hi].eps - s[lo].eps);
  return scale * (s[lo].g + t * (s[hi].g - s[lo].g));
}

enum class DosIssue
{
  NegativeDensity,
  NonzeroAtOrigin,
  NonMonotoneGrid,
  FirstSampleNotAtOrigin,
};

inline const char* to_string(DosIssue issue)
{
  switch (issue)
  {
    case DosIssue::NegativeDensity: return "negative_density";
    case DosIssue::NonzeroAtOrigin: return "nonzero_at_origin";
    case DosIssue::NonMonotoneGrid: return "non_monotone_grid";
    case DosIssue::FirstSampleNotAtOrigin: return "first_sample_not_at_origin";
  }
  return "unknown";
}

struct ValidationReport
{
  std::vector<DosIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(DosIssue i) const
  {
    for (auto x : issues)
      if (x == i) return true;
    return false;
  }
  /// Usable for integration: ordered grid starting at the origin. Sign and
  /// boundary-value problems do not block computation.
  bool structurally_sound() const
  {
    return !has(DosIssue::NonMonotoneGrid) && !has(DosIssue::FirstSampleNotAtOrigin);
  }
};

/// Lists every violated invariant; never throws.
///
/// Max-pressure profiles are exempt from the g(0) = 0 boundary check: the
/// closed-form family is nonzero at the origin and is only made admissible by
/// its wealth cutoff.
inline ValidationReport validate_dos(const DensityOfStates& dos)
{
  ValidationReport report;
  const auto* t = dos.as<TabulatedDos>();
  if (!t) return report;

  const auto& s = t->samples;
  bool negative = false;
  bool monotone = true;
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    if (s[i].g < 0.0) negative = true;
    if (i > 0 && !(s[i].eps > s[i - 1].eps)) monotone = false;
  }
  if (negative) report.issues.push_back(DosIssue::NegativeDensity);
  if (s.front().eps != 0.0) report.issues.push_back(DosIssue::FirstSampleNotAtOrigin);
  else if (s.front().g != 0.0) report.issues.push_back(DosIssue::NonzeroAtOrigin);
  if (!monotone) report.issues.push_back(DosIssue::NonMonotoneGrid);
  return report;
}

}
