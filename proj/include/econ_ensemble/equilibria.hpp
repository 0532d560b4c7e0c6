#pragma once

// Two-system analysis: joint equilibrium by maximizing the combined microstate
// count over lattice splits, flow direction from (T, mu), invasion from p.

#include "econ_ensemble/dos.hpp"
#include "econ_ensemble/ensemble.hpp"
#include "econ_ensemble/errors.hpp"
#include "econ_ensemble/microstates.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace econ
{

enum class Flow
{
  OneToTwo,
  TwoToOne,
  None
};

struct FlowPrediction
{
  Flow wealth_flow;
  Flow individual_flow;
};

enum class InvasionVerdict
{
  FirstInvadesSecond,
  SecondInvadesFirst,
  DynamicEquilibrium
};

inline const char* to_string(Flow f)
{
  switch (f)
  {
    case Flow::OneToTwo: return "OneToTwo";
    case Flow::TwoToOne: return "TwoToOne";
    case Flow::None: return "None";
  }
  return "unknown";
}

inline const char* to_string(InvasionVerdict v)
{
  switch (v)
  {
    case InvasionVerdict::FirstInvadesSecond: return "FirstInvadesSecond";
    case InvasionVerdict::SecondInvadesFirst: return "SecondInvadesFirst";
    case InvasionVerdict::DynamicEquilibrium: return "DynamicEquilibrium";
  }
  return "unknown";
}

inline constexpr double default_equality_tolerance = 1e-9;

/// |a - b| <= tol * max(|a|, |b|); infinities compare equal only to themselves.
inline bool nearly_equal(double a, double b, double tol)
{
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

namespace detail
{
inline Flow downhill(double x1, double x2, double tol)
{
  if (nearly_equal(x1, x2, tol)) return Flow::None;
  return x1 > x2 ? Flow::OneToTwo : Flow::TwoToOne;
}
}

/// Wealth moves from the hotter system to the colder one; individuals move
/// from higher to lower economic potential. Potentials are compared through
/// 1/mu = d lnOmega/dN (individuals go where it is larger), which is the same
/// thing when both potentials have one sign and still follows Omega when they
/// do not.
inline FlowPrediction flow_direction(double t1, double mu1, double t2, double mu2,
                                     double tol = default_equality_tolerance)
{
  detail::require(t1 > 0.0 && t2 > 0.0, "flow_direction: temperatures must be > 0");
  detail::require(!std::isnan(mu1) && !std::isnan(mu2), "flow_direction: potentials are NaN");
  Flow individuals = Flow::None;
  if (!nearly_equal(mu1, mu2, tol))
    individuals = 1.0 / mu1 < 1.0 / mu2 ? Flow::OneToTwo : Flow::TwoToOne;
  return {detail::downhill(t1, t2, tol), individuals};
}

/// The system with the larger economic pressure invades the other.
inline InvasionVerdict invasion_outcome(double p1, double p2,
                                        double tol = default_equality_tolerance)
{
  if (nearly_equal(p1, p2, tol)) return InvasionVerdict::DynamicEquilibrium;
  return p1 > p2 ? InvasionVerdict::FirstInvadesSecond : InvasionVerdict::SecondInvadesFirst;
}

/// ln Omega(k * e_step, n) on the lattice 0 <= k <= k_max, 0 <= n <= n_max.
class EntropyTable
{
public:
  EntropyTable(const LevelSystem& sys, std::size_t k_max, unsigned n_max, double e_step,
               CountingMode mode, double e_tol = 1e-9, const EnumerationLimits& limits = {})
    : k_max_(k_max), n_max_(n_max), e_step_(e_step), values_((k_max + 1) * (n_max + 1))
  {
    for (std::size_t k = 0; k <= k_max; ++k)
      for (unsigned n = 0; n <= n_max; ++n)
        values_[index(k, n)] =
            log_total_microstates(sys, n, static_cast<double>(k) * e_step, e_tol, mode, limits);
  }

  double at(std::size_t k, unsigned n) const { return values_[index(k, n)]; }
  bool feasible(std::size_t k, unsigned n) const { return std::isfinite(at(k, n)); }
  double e_step() const { return e_step_; }

  /// d ln Omega / dE at (k, n): central where both lattice neighbours are
  /// feasible, one-sided otherwise.
  std::optional<double> slope_e(std::size_t k, unsigned n) const
  {
    const bool down = k > 0 && feasible(k - 1, n);
    const bool up = k < k_max_ && feasible(k + 1, n);
    if (down && up) return (at(k + 1, n) - at(k - 1, n)) / (2.0 * e_step_);
    if (up) return (at(k + 1, n) - at(k, n)) / e_step_;
    if (down) return (at(k, n) - at(k - 1, n)) / e_step_;
    return std::nullopt;
  }

  /// d ln Omega / dN at (k, n), same stencil rules as slope_e.
  std::optional<double> slope_n(std::size_t k, unsigned n) const
  {
    const bool down = n > 0 && feasible(k, n - 1);
    const bool up = n < n_max_ && feasible(k, n + 1);
    if (down && up) return (at(k, n + 1) - at(k, n - 1)) / 2.0;
    if (up) return at(k, n + 1) - at(k, n);
    if (down) return at(k, n) - at(k, n - 1);
    return std::nullopt;
  }

private:
  std::size_t index(std::size_t k, unsigned n) const { return k * (n_max_ + 1) + n; }

  std::size_t k_max_;
  unsigned n_max_;
  double e_step_;
  std::vector<double> values_;
};

/// Reciprocal of a lattice slope; NaN where undefined, +-inf where flat.
inline double reciprocal(std::optional<double> slope)
{
  if (!slope) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / *slope;
}

struct SubsystemIntensives
{
  double temperature;
  double potential;
};

struct SplitEntry
{
  double e1;
  unsigned n1;
  double omega_log_total;
};

/// Combined microstate landscape of two systems sharing e_total and n_total.
///
/// The objective is ln Omega1 + ln Omega2, plus ln C(n_total, n1) in
/// distinguishable mode (the ways of assigning labelled individuals to the two
/// systems). With that term both counting modes differ by the constant
/// ln n_total! and share their maximizers. Intensive quantities are taken from
/// corrected Boltzmann entropies, whose sum is what the maximization balances.
class JointLandscape
{
public:
  JointLandscape(const LevelSystem& sys1, const LevelSystem& sys2, double e_total,
                 unsigned n_total, CountingMode mode, double e_step = 1.0, double e_tol = 1e-9,
                 const EnumerationLimits& limits = {})
    : n_total_(n_total),
      mode_(mode),
      k_total_(lattice_count(e_total, e_step)),
      first_(sys1, k_total_, n_total, e_step, CountingMode::CorrectedBoltzmann, e_tol, limits),
      second_(sys2, k_total_, n_total, e_step, CountingMode::CorrectedBoltzmann, e_tol, limits)
  {
  }

  std::size_t k_total() const { return k_total_; }
  unsigned n_total() const { return n_total_; }
  double e_step() const { return first_.e_step(); }
  const EntropyTable& first() const { return first_; }
  const EntropyTable& second() const { return second_; }

  /// Objective at split (k1 lattice quanta, n1 individuals) for system 1.
  double objective(std::size_t k1, unsigned n1) const
  {
    double value = first_.at(k1, n1) + second_.at(k_total_ - k1, n_total_ - n1);
    if (mode_ == CountingMode::Distinguishable)
      value += std::lgamma(n_total_ + 1.0);  // ln C(n, n1) + ln n1! + ln n2!
    return value;
  }

  std::pair<SubsystemIntensives, SubsystemIntensives> intensives(std::size_t k1,
                                                                 unsigned n1) const
  {
    const std::size_t k2 = k_total_ - k1;
    const unsigned n2 = n_total_ - n1;
    return {{reciprocal(first_.slope_e(k1, n1)), reciprocal(first_.slope_n(k1, n1))},
            {reciprocal(second_.slope_e(k2, n2)), reciprocal(second_.slope_n(k2, n2))}};
  }

private:
  static std::size_t lattice_count(double e_total, double e_step)
  {
    detail::require(e_step > 0.0, "joint_equilibrium: e_step must be > 0");
    detail::require(e_total >= 0.0, "joint_equilibrium: e_total must be >= 0");
    const double k = std::round(e_total / e_step);
    detail::require(std::abs(k * e_step - e_total) <= 1e-9 * std::max(1.0, e_total),
                    "joint_equilibrium: e_total must be a multiple of e_step");
    return static_cast<std::size_t>(k);
  }

  unsigned n_total_;
  CountingMode mode_;
  std::size_t k_total_;
  EntropyTable first_;
  EntropyTable second_;
};

struct JointEquilibrium
{
  double e1;
  unsigned n1;
  SubsystemIntensives first;
  SubsystemIntensives second;
  double t_common;   ///< 2 / (beta1 + beta2) from the lattice slopes
  double mu_common;  ///< 2 / (alpha1 + alpha2) likewise
  double omega_log_total;
  std::vector<SplitEntry> splits;  ///< every feasible split, (e1, n1) ascending
};

/// Lattice split maximizing the joint microstate count. Ties go to the
/// smallest (e1, n1). NotFoundError if no split is feasible.
inline JointEquilibrium joint_equilibrium(const LevelSystem& sys1, const LevelSystem& sys2,
                                          double e_total, unsigned n_total,
                                          CountingMode mode = CountingMode::CorrectedBoltzmann,
                                          double e_step = 1.0, double e_tol = 1e-9,
                                          const EnumerationLimits& limits = {})
{
  const JointLandscape land(sys1, sys2, e_total, n_total, mode, e_step, e_tol, limits);

  JointEquilibrium out{};
  std::optional<std::pair<std::size_t, unsigned>> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= land.k_total(); ++k)
  {
    for (unsigned n = 0; n <= n_total; ++n)
    {
      const double value = land.objective(k, n);
      if (!std::isfinite(value)) continue;
      out.splits.push_back({static_cast<double>(k) * e_step, n, value});
      if (!best || value > best_value + 1e-12 * std::max(1.0, std::abs(best_value)))
      {
        best = {k, n};
        best_value = value;
      }
    }
  }
  if (!best) throw NotFoundError("joint_equilibrium: no feasible split of (E, N)");

  const auto [k1, n1] = *best;
  const auto [first, second] = land.intensives(k1, n1);
  out.e1 = static_cast<double>(k1) * e_step;
  out.n1 = n1;
  out.first = first;
  out.second = second;
  out.t_common = 2.0 / (1.0 / first.temperature + 1.0 / second.temperature);
  out.mu_common = 2.0 / (1.0 / first.potential + 1.0 / second.potential);
  out.omega_log_total = best_value;
  return out;
}

/// Chain of equilibria along a slowly varying parameter schedule.
inline std::vector<Observables> quasi_static_trajectory(const DensityOfStates& dos,
                                                        const std::vector<EnsembleParams>& schedule)
{
  detail::require(!schedule.empty(), "quasi_static_trajectory: empty schedule");
  std::vector<Observables> out;
  out.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i)
  {
    try
    {
      out.push_back(observe(dos, schedule[i]));
    }
    catch (const NumericalError& e)
    {
      throw NumericalError(std::string(e.what()) + " (schedule index " + std::to_string(i) + ")");
    }
  }
  return out;
}

}
