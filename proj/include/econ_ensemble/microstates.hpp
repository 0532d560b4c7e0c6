#pragma once

// Exact statistical mechanics of small discrete systems: occupation-number
// enumeration, microstate counting, and lattice difference quotients of
// ln(Omega) for the economic temperature and potential.

#include "econ_ensemble/dos.hpp"
#include "econ_ensemble/errors.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace econ
{

struct Level
{
  double eps;
  unsigned weight;
};

/// Discrete wealth levels with degeneracies; eps strictly increasing, weights >= 1.
class LevelSystem
{
public:
  explicit LevelSystem(std::vector<Level> levels) : levels_(std::move(levels))
  {
    detail::require(!levels_.empty(), "LevelSystem: need at least one level");
    for (std::size_t i = 0; i < levels_.size(); ++i)
    {
      detail::require(std::isfinite(levels_[i].eps) && levels_[i].eps >= 0.0,
                      "LevelSystem: eps must be finite and >= 0");
      detail::require(levels_[i].weight >= 1, "LevelSystem: weights must be >= 1");
      if (i > 0)
        detail::require(levels_[i].eps > levels_[i - 1].eps,
                        "LevelSystem: eps must be strictly increasing");
    }
  }

  const std::vector<Level>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const Level& operator[](std::size_t i) const { return levels_[i]; }

  LevelSystem scaled_weights(unsigned factor) const
  {
    auto copy = levels_;
    for (auto& l : copy) l.weight *= factor;
    return LevelSystem(std::move(copy));
  }

private:
  std::vector<Level> levels_;
};

struct OccupationVector
{
  std::vector<unsigned> a;
  unsigned n_total = 0;
  double e_total = 0.0;

  static OccupationVector from_counts(const LevelSystem& sys, std::vector<unsigned> counts)
  {
    detail::require(counts.size() == sys.size(), "OccupationVector: size mismatch");
    OccupationVector occ{std::move(counts), 0, 0.0};
    for (std::size_t l = 0; l < sys.size(); ++l)
    {
      occ.n_total += occ.a[l];
      occ.e_total += occ.a[l] * sys[l].eps;
    }
    return occ;
  }

  bool operator==(const OccupationVector&) const = default;
};

enum class CountingMode
{
  CorrectedBoltzmann,  ///< prod w^a / a!
  Distinguishable,     ///< N! prod w^a / a!
};

struct EnumerationLimits
{
  unsigned max_n = 20;
  std::size_t max_levels = 12;
};

namespace detail
{

inline void check_limits(const LevelSystem& sys, unsigned n, const EnumerationLimits& limits)
{
  if (n > limits.max_n)
    throw ResourceLimitError("enumeration: n=" + std::to_string(n) + " exceeds cap " +
                             std::to_string(limits.max_n));
  if (sys.size() > limits.max_levels)
    throw ResourceLimitError("enumeration: " + std::to_string(sys.size()) +
                             " levels exceeds cap " + std::to_string(limits.max_levels));
}

// Visits every occupation vector with sum n and |energy - e| <= e_tol, in
// descending lexicographic order.
template <class Visit>
void for_each_distribution(const LevelSystem& sys, unsigned n, double e, double e_tol,
                           Visit&& visit)
{
  const std::size_t levels = sys.size();
  std::vector<unsigned> a(levels, 0);
  std::function<void(std::size_t, unsigned, double)> recurse = [&](std::size_t l,
                                                                   unsigned remaining,
                                                                   double energy) {
    if (l + 1 == levels)
    {
      a[l] = remaining;
      const double total = energy + remaining * sys[l].eps;
      if (std::abs(total - e) <= e_tol) visit(a, total);
      return;
    }
    // Remaining individuals must land on levels >= l.
    const double lo = energy + remaining * sys[l].eps;
    const double hi = energy + remaining * sys[levels - 1].eps;
    if (lo > e + e_tol || hi < e - e_tol) return;
    for (unsigned k = remaining + 1; k-- > 0;)
    {
      a[l] = k;
      recurse(l + 1, remaining - k, energy + k * sys[l].eps);
    }
    a[l] = 0;
  };
  recurse(0, n, 0.0);
}

using u128 = unsigned __int128;

inline std::optional<u128> checked_mul(u128 x, u128 y)
{
  if (x != 0 && y > std::numeric_limits<u128>::max() / x) return std::nullopt;
  return x * y;
}

}

/// Every occupation vector with sum(a) = n and |sum(a eps) - e| <= e_tol,
/// in descending lexicographic order. ResourceLimitError beyond the caps.
inline std::vector<OccupationVector> enumerate_distributions(const LevelSystem& sys, unsigned n,
                                                             double e, double e_tol = 1e-9,
                                                             const EnumerationLimits& limits = {})
{
  detail::check_limits(sys, n, limits);
  std::vector<OccupationVector> out;
  detail::for_each_distribution(sys, n, e, e_tol, [&](const std::vector<unsigned>& a, double) {
    out.push_back(OccupationVector::from_counts(sys, a));
  });
  return out;
}

/// ln Omega{a}. Log-gamma accumulation, valid for any n.
inline double log_microstate_count(const OccupationVector& occ, const LevelSystem& sys,
                                   CountingMode mode = CountingMode::CorrectedBoltzmann)
{
  detail::require(occ.a.size() == sys.size(), "microstate_count: occupation/system mismatch");
  double log_omega = 0.0;
  unsigned n = 0;
  for (std::size_t l = 0; l < sys.size(); ++l)
  {
    const unsigned k = occ.a[l];
    n += k;
    log_omega += k * std::log(static_cast<double>(sys[l].weight)) - std::lgamma(k + 1.0);
  }
  if (mode == CountingMode::Distinguishable) log_omega += std::lgamma(n + 1.0);
  return log_omega;
}

/// Omega{a}. Exact integer arithmetic for n <= 20 when the numerator fits in
/// 128 bits, log-domain otherwise.
inline double microstate_count(const OccupationVector& occ, const LevelSystem& sys,
                               CountingMode mode = CountingMode::CorrectedBoltzmann)
{
  detail::require(occ.a.size() == sys.size(), "microstate_count: occupation/system mismatch");
  unsigned n = 0;
  for (unsigned k : occ.a) n += k;

  if (n <= 20)
  {
    std::optional<detail::u128> numerator = 1;
    std::uint64_t denominator = 1;
    for (std::size_t l = 0; l < sys.size() && numerator; ++l)
    {
      for (unsigned j = 1; j <= occ.a[l] && numerator; ++j)
      {
        numerator = detail::checked_mul(*numerator, sys[l].weight);
        denominator *= j;
      }
    }
    if (numerator)
    {
      if (mode == CountingMode::CorrectedBoltzmann)
        return static_cast<double>(static_cast<long double>(*numerator) /
                                   static_cast<long double>(denominator));
      // multinomial n! / prod a! is an integer; fold it into the numerator.
      detail::u128 multinomial = 1;
      unsigned placed = 0;
      for (unsigned k : occ.a)
      {
        for (unsigned j = 1; j <= k; ++j)
        {
          ++placed;
          multinomial = multinomial * placed / j;  // stays integral: binomial build-up
        }
      }
      if (auto exact = detail::checked_mul(multinomial, *numerator))
        return static_cast<double>(*exact);
    }
  }
  return std::exp(log_microstate_count(occ, sys, mode));
}

/// Omega(N, E): the sum of Omega{a} over all matching distributions.
inline double total_microstates(const LevelSystem& sys, unsigned n, double e, double e_tol = 1e-9,
                                CountingMode mode = CountingMode::CorrectedBoltzmann,
                                const EnumerationLimits& limits = {})
{
  detail::check_limits(sys, n, limits);
  double total = 0.0;
  detail::for_each_distribution(sys, n, e, e_tol, [&](const std::vector<unsigned>& a, double) {
    total += microstate_count(OccupationVector::from_counts(sys, a), sys, mode);
  });
  return total;
}

/// ln Omega(N, E); -infinity when (N, E) is infeasible.
inline double log_total_microstates(const LevelSystem& sys, unsigned n, double e,
                                    double e_tol = 1e-9,
                                    CountingMode mode = CountingMode::CorrectedBoltzmann,
                                    const EnumerationLimits& limits = {})
{
  const double total = total_microstates(sys, n, e, e_tol, mode, limits);
  return total > 0.0 ? std::log(total) : -std::numeric_limits<double>::infinity();
}

/// The distribution with the largest Omega{a}; ties go to the first vector in
/// enumeration order (descending lexicographic). NotFoundError if infeasible.
inline OccupationVector most_probable_distribution(
    const LevelSystem& sys, unsigned n, double e, double e_tol = 1e-9,
    CountingMode mode = CountingMode::CorrectedBoltzmann, const EnumerationLimits& limits = {})
{
  detail::check_limits(sys, n, limits);
  std::optional<OccupationVector> best;
  double best_log = -std::numeric_limits<double>::infinity();
  detail::for_each_distribution(sys, n, e, e_tol, [&](const std::vector<unsigned>& a, double) {
    auto occ = OccupationVector::from_counts(sys, a);
    const double value = log_microstate_count(occ, sys, mode);
    if (!best || value > best_log + 1e-12 * std::max(1.0, std::abs(best_log)))
    {
      best = std::move(occ);
      best_log = value;
    }
  });
  if (!best)
    throw NotFoundError("most_probable_distribution: no distribution with N=" +
                        std::to_string(n) + ", E=" + std::to_string(e));
  return *best;
}

/// delta / (ln Omega_hi - ln Omega_lo). Both T = dE/d lnOmega and
/// mu = dN/d lnOmega reduce to this quotient.
inline double reciprocal_log_slope(double log_omega_lo, double log_omega_hi, double delta)
{
  const double diff = log_omega_hi - log_omega_lo;
  if (!std::isfinite(log_omega_lo) || !std::isfinite(log_omega_hi))
    throw DegenerateDifferenceError("difference quotient: neighbouring state is infeasible");
  if (diff == 0.0)
    throw DegenerateDifferenceError("difference quotient: flat ln(Omega), reciprocal is infinite");
  return delta / diff;
}

/// T = delta_e / [ln Omega(n, e + delta_e) - ln Omega(n, e)].
inline double temperature_from_entropy(const LevelSystem& sys, unsigned n, double e,
                                       double delta_e,
                                       CountingMode mode = CountingMode::CorrectedBoltzmann,
                                       double e_tol = 1e-9)
{
  detail::require(delta_e != 0.0, "temperature_from_entropy: delta_e must be nonzero");
  return reciprocal_log_slope(log_total_microstates(sys, n, e, e_tol, mode),
                              log_total_microstates(sys, n, e + delta_e, e_tol, mode), delta_e);
}

/// mu = delta_n / [ln Omega(n + delta_n, e) - ln Omega(n, e)].
inline double potential_from_entropy(const LevelSystem& sys, unsigned n, double e, int delta_n,
                                     CountingMode mode = CountingMode::CorrectedBoltzmann,
                                     double e_tol = 1e-9)
{
  detail::require(delta_n != 0, "potential_from_entropy: delta_n must be nonzero");
  detail::require(static_cast<long long>(n) + delta_n >= 0,
                  "potential_from_entropy: n + delta_n must be >= 0");
  const unsigned shifted = static_cast<unsigned>(static_cast<long long>(n) + delta_n);
  return reciprocal_log_slope(log_total_microstates(sys, n, e, e_tol, mode),
                              log_total_microstates(sys, shifted, e, e_tol, mode),
                              static_cast<double>(delta_n));
}

/// ln Z = sum_l w_l exp(-alpha - beta eps_l) for a discrete level system.
inline double level_ln_z(const LevelSystem& sys, const EnsembleParams& params)
{
  double sum = 0.0;
  for (const auto& l : sys.levels())
    sum += l.weight * std::exp(-params.alpha() - params.beta() * l.eps);
  return sum;
}

struct GrandSumCheck
{
  double direct;      ///< truncated sum over (N_s, E_s) of Omega e^{-alpha N_s - beta E_s}
  double factorized;  ///< prod_l exp(w_l e^{-alpha - beta eps_l})
  double tail_bound;  ///< upper bound on factorized - direct
};

/// Compares the truncated grand sum (corrected Boltzmann counting, N_s <= n_cap,
/// E_s <= e_cap) with the level-factorized closed form. TruncationError if the
/// tail bound relative to the closed form exceeds `tolerance`.
inline GrandSumCheck grand_sum_check(const LevelSystem& sys, const EnsembleParams& params,
                                     unsigned n_cap, double e_cap, double tolerance = 1e-9)
{
  detail::require(e_cap >= 0.0, "grand_sum_check: e_cap must be >= 0");
  const std::size_t levels = sys.size();
  {
    // Number of vectors with sum <= n_cap is C(n_cap + L, L).
    double count = 1.0;
    for (std::size_t k = 1; k <= levels; ++k) count = count * (n_cap + k) / k;
    if (count > 5e6)
      throw ResourceLimitError("grand_sum_check: " + std::to_string(count) +
                               " occupation vectors exceeds cap 5e6");
  }

  double direct = 0.0;
  std::vector<unsigned> a(levels, 0);
  std::function<void(std::size_t, unsigned, double)> recurse = [&](std::size_t l,
                                                                   unsigned used, double energy) {
    if (l == levels)
    {
      const auto occ = OccupationVector::from_counts(sys, a);
      direct += microstate_count(occ, sys, CountingMode::CorrectedBoltzmann) *
                std::exp(-params.alpha() * used - params.beta() * energy);
      return;
    }
    for (unsigned k = 0; used + k <= n_cap; ++k)
    {
      const double next = energy + k * sys[l].eps;
      if (next > e_cap + 1e-12) break;
      a[l] = k;
      recurse(l + 1, used + k, next);
    }
    a[l] = 0;
  };
  recurse(0, 0, 0.0);

  const double ln_z = level_ln_z(sys, params);
  const double factorized = std::exp(ln_z);

  // Omitted: N_s > n_cap (Poisson tail of X = ln Z) or E_s > e_cap (Chernoff).
  double population_tail = 0.0;
  {
    double term = std::exp(-std::lgamma(n_cap + 2.0) + (n_cap + 1.0) * std::log(ln_z));
    for (unsigned k = n_cap + 1; k < n_cap + 10000; ++k)
    {
      population_tail += term;
      const double ratio = ln_z / (k + 1.0);
      if (ratio < 0.5 && term <= 1e-18 * population_tail)
      {
        population_tail += term * ratio / (1.0 - ratio);
        break;
      }
      term *= ratio;
    }
  }
  double energy_tail = 0.0;
  if (e_cap < n_cap * sys[levels - 1].eps)
  {
    double best_log = std::numeric_limits<double>::infinity();
    for (int k = -8; k <= 8; ++k)
    {
      const double t = std::ldexp(1.0, k);
      double log_bound = -t * e_cap;
      for (const auto& l : sys.levels())
        log_bound += l.weight * std::exp(-params.alpha() - params.beta() * l.eps + t * l.eps);
      best_log = std::min(best_log, log_bound);
    }
    energy_tail = std::exp(best_log);
  }

  const GrandSumCheck out{direct, factorized, population_tail + energy_tail};
  if (out.tail_bound > tolerance * factorized)
    throw TruncationError("grand_sum_check: tail bound " + std::to_string(out.tail_bound) +
                          " exceeds tolerance; raise n_cap/e_cap");
  return out;
}

}
