#include "jet.hpp"

#include <econ_ensemble/variational.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace econ;

namespace
{
std::vector<double> grid(double lo, double hi, std::size_t points)
{
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i)
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return x;
}

std::vector<DosSample> linear_dos(double lo, double hi, std::size_t points)
{
  std::vector<DosSample> out;
  for (double e : grid(lo, hi, points)) out.push_back({e, 1.0 + e});
  return out;
}
}

TEST(Profiles, ValuesAtOrigin)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto gp = optimal_dos_profile(1, 0, 1, 1);
  // exp(-1 - e) and exp(e - 1)
  EXPECT_NEAR(vp(0.0), 0.024275641750774681, 1e-17);
  EXPECT_NEAR(profile_value(gp, 0.0), 5.5749415247608806, 1e-14);

  EXPECT_EQ(optimal_volume_profile(0, 3, 1, 1)(2.0), 3.0);
  EXPECT_EQ(profile_value(optimal_dos_profile(0, 2, 1, 1), 5.0), 2.0);
  EXPECT_THROW(optimal_volume_profile(1, 0, 1, 0), ParameterError);
  EXPECT_THROW(optimal_dos_profile(1, 0, 1, -1), ParameterError);
}

TEST(Profiles, Monotone)
{
  const auto vp = optimal_volume_profile(2, 0.5, 0.3, 1.2);
  const auto gp = optimal_dos_profile(0.7, 0, 0.3, 1.2);
  double v_prev = vp(0.0), g_prev = profile_value(gp, 0.0);
  for (double x = 0.05; x <= 2.0; x += 0.05)
  {
    EXPECT_LT(vp(x), v_prev);
    EXPECT_GT(profile_value(gp, x), g_prev);
    v_prev = vp(x);
    g_prev = profile_value(gp, x);
  }
  EXPECT_NEAR(vp(40.0), 0.5, 1e-15);
}

TEST(Profiles, DerivativesMatchFiniteDifferences)
{
  const auto vp = optimal_volume_profile(1.3, 0, 0.5, 0.8);
  const auto gp = optimal_dos_profile(0.9, 0, 0.5, 0.8);
  for (double x : {0.0, 0.4, 1.1})
  {
    const double h = 1e-5;
    const auto dv = vp.derivatives(x + 2 * h);
    const double v1 = (vp(x + 3 * h) - vp(x + h)) / (2 * h);
    EXPECT_NEAR(std::exp(dv.log_scale) * dv.first, v1, 1e-7 * std::abs(v1));
    const auto dg = profile_derivatives(gp, x + 2 * h);
    const double g1 = (profile_value(gp, x + 3 * h) - profile_value(gp, x + h)) / (2 * h);
    EXPECT_NEAR(std::exp(dg.log_scale) * dg.first, g1, 1e-7 * std::abs(g1));
    const double g2 = (profile_value(gp, x + 3 * h) - 2 * profile_value(gp, x + 2 * h) +
                       profile_value(gp, x + h)) / (h * h);
    EXPECT_NEAR(std::exp(dg.log_scale) * dg.second, g2, 1e-4 * std::abs(g2));
  }
}

TEST(Profiles, OverflowIsReported)
{
  const auto gp = optimal_dos_profile(1, 0, 1, 1);
  EXPECT_THROW(profile_value(gp, 10.0), OverflowError);
}

TEST(EulerLagrange, ClosedFormsSatisfyEquations)
{
  const auto x = grid(0.0, 3.0, 64);
  for (double alpha : {0.5, 1.0, 2.0})
    for (double beta : {0.5, 1.0, 2.0})
    {
      const auto r = euler_lagrange_residual(optimal_volume_profile(1.7, 0.2, alpha, beta),
                                             optimal_dos_profile(0.6, 3.0, alpha, beta), x);
      EXPECT_LE(r.max_abs_residual_v, 1e-9) << alpha << "," << beta;
      EXPECT_LE(r.max_abs_residual_g, 1e-9) << alpha << "," << beta;
    }
}

TEST(EulerLagrange, AutodiffDerivativesAlsoSatisfyEquations)
{
  const auto x = grid(0.0, 3.0, 64);
  for (double alpha : {0.5, 1.0, 2.0})
    for (double beta : {0.5, 1.0, 2.0})
    {
      const auto r = euler_lagrange_residual(
          [&](double e) { return jet::volume(1.7, alpha, beta, e); },
          [&](double e) { return jet::dos(0.6, alpha, beta, e); }, alpha, beta, x);
      EXPECT_LE(r.max_abs_residual_v, 1e-9) << alpha << "," << beta;
      EXPECT_LE(r.max_abs_residual_g, 1e-9) << alpha << "," << beta;
    }
}

TEST(EulerLagrange, ConstantProfilesAreTrivialSolutions)
{
  const auto r = euler_lagrange_residual(optimal_volume_profile(0, 4, 1, 1),
                                         optimal_dos_profile(0, 2, 1, 1), grid(0, 3, 64));
  EXPECT_EQ(r.max_abs_residual_v, 0.0);
  EXPECT_EQ(r.max_abs_residual_g, 0.0);
}

TEST(EulerLagrange, PerturbedAndWrongProfilesFail)
{
  const auto x = grid(0.0, 3.0, 64);
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto gp = optimal_dos_profile(1, 0, 1, 1);
  // V + 0.1 eps
  const auto bent = euler_lagrange_residual(
      [&](double e) { return vp.derivatives(e).plus(0.1, 0.0); },
      [&](double e) { return profile_derivatives(gp, e); }, 1.0, 1.0, x);
  EXPECT_GT(bent.max_abs_residual_v, 1e-3);
  EXPECT_LE(bent.max_abs_residual_g, 1e-9);

  // linear g = 1 + eps
  const auto linear = euler_lagrange_residual(
      [&](double e) { return vp.derivatives(e); },
      [](double) { return ProfileDerivatives{0.0, 1.0, 0.0}; }, 1.0, 1.0, x);
  EXPECT_GE(linear.max_abs_residual_g, 1e3 * 1e-9);

  EXPECT_THROW(euler_lagrange_residual(vp, optimal_dos_profile(1, 0, 1, 2), x), ParameterError);
}

TEST(Cutoff, RoundTripOnRandomCases)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c1(0.2, 5.0), alpha(-1.0, 2.0), beta(0.2, 3.0),
      eps0(0.0, 2.0);
  for (int i = 0; i < 20; ++i)
  {
    const auto vp = optimal_volume_profile(c1(rng), 0.0, alpha(rng), beta(rng));
    const double target = eps0(rng);
    EXPECT_NEAR(wealth_cutoff(vp, vp(target)), target, 1e-10) << "case " << i;
  }
}

TEST(Cutoff, EdgeCases)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  EXPECT_EQ(wealth_cutoff(vp, vp(0.0)), 0.0);
  EXPECT_THROW(wealth_cutoff(vp, 2 * vp(0.0)), NoRootError);
  EXPECT_THROW(wealth_cutoff(vp, 0.0), NoRootError);
  EXPECT_THROW(wealth_cutoff(vp, -1.0), NoRootError);
  EXPECT_THROW(wealth_cutoff(optimal_volume_profile(-1, 0, 1, 1), 0.01), ParameterError);
}

TEST(Cutoff, LevelMassMatchesExponentialIntegral)
{
  // int_0^1 e^{e^{1+x} - 1} dx = e^{-1} (Ei(e^2) - Ei(e))
  const auto gp = optimal_dos_profile(1, 0, 1, 1);
  const double expected = std::exp(-1.0) * (std::expint(std::exp(2.0)) - std::expint(std::numbers::e));
  EXPECT_NEAR(cutoff_level_mass(gp, 1.0), expected, 1e-9 * expected);
  EXPECT_NEAR(cutoff_level_mass(gp, 1.0), 94.057895410906797, 1e-8);

  // fine trapezoid as a second opinion
  const std::size_t n = 1000000;
  double trap = 0.0;
  for (std::size_t i = 0; i <= n; ++i)
  {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    trap += w * profile_value(gp, static_cast<double>(i) / n);
  }
  trap /= n;
  EXPECT_NEAR(cutoff_level_mass(gp, 1.0), trap, 1e-7 * trap);

  EXPECT_EQ(cutoff_level_mass(gp, 0.0), 0.0);
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto r = wealth_cutoff_with_mass(vp, gp, vp(1.0));
  EXPECT_NEAR(r.eps0, 1.0, 1e-10);
  EXPECT_NEAR(r.level_mass, expected, 1e-8 * expected);
}

TEST(Stationarity, ClosedFormIsStationary)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto samples = sample_profile(optimal_dos_profile(1, 0, 1, 1), 0, 1, 1025);
  const auto report = stationarity_check(samples, vp, {});
  EXPECT_GE(report.reduction_ratio, 3.5);
  EXPECT_LT(report.reduction_ratio, 4.5);

  const auto wrong = stationarity_check(linear_dos(0, 1, 1025), vp, {});
  EXPECT_LT(wrong.reduction_ratio, 2.5);
  EXPECT_GE(wrong.first_variation, 1e3 * report.first_variation);
}

TEST(Stationarity, ProductRuleReadingIsNotStationary)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto samples = sample_profile(optimal_dos_profile(1, 0, 1, 1), 0, 1, 1025);
  StationarityConfig config;
  config.reading = PressureReading::ProductRule;
  EXPECT_LT(stationarity_check(samples, vp, config).reduction_ratio, 3.5);
}

TEST(Stationarity, Deterministic)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  const auto samples = sample_profile(optimal_dos_profile(1, 0, 1, 1), 0, 1, 257);
  const auto a = stationarity_check(samples, vp, {});
  const auto b = stationarity_check(samples, vp, {});
  EXPECT_EQ(a.first_variation, b.first_variation);
  EXPECT_EQ(a.reduction_ratio, b.reduction_ratio);
}

TEST(Stationarity, ConfigurationErrorsAndZeroPerturbation)
{
  const auto vp = optimal_volume_profile(1, 0, 1, 1);
  EXPECT_THROW(stationarity_check(linear_dos(0, 1, 15), vp, {}), ConfigurationError);
  auto unordered = linear_dos(0, 1, 32);
  std::swap(unordered[3], unordered[4]);
  EXPECT_THROW(stationarity_check(unordered, vp, {}), ConfigurationError);

  StationarityConfig still;
  still.scale = 0.0;
  const auto r = stationarity_check(linear_dos(0, 1, 32), vp, still);
  EXPECT_EQ(r.first_variation, 0.0);
  EXPECT_EQ(r.increment_full, 0.0);
  EXPECT_TRUE(std::isnan(r.reduction_ratio));
}
