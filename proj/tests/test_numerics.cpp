#include <econ_ensemble/finite_difference.hpp>
#include <econ_ensemble/quadrature.hpp>
#include <econ_ensemble/roots.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace econ;

TEST(Quadrature, PolynomialIsExact)
{
  const auto r = quad::integrate([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 4.0 - 4.0 + 2.0, 1e-14);
}

TEST(Quadrature, OscillatoryIntegrandMeetsRelativeTolerance)
{
  const auto r = quad::integrate([](double x) { return std::sin(20 * x) * std::exp(-x); }, 0.0,
                                 std::numbers::pi);
  // closed form of int_0^pi e^{-x} sin(20x) dx
  const double exact = 20.0 * (1.0 - std::exp(-std::numbers::pi)) / (1.0 + 400.0);
  EXPECT_NEAR(r.value, exact, 1e-10 * std::abs(exact));
}

TEST(Quadrature, SemiInfiniteExponential)
{
  const auto r = quad::integrate_to_infinity([](double x) { return x * std::exp(-2 * x); }, 0.0);
  EXPECT_NEAR(r.value, 0.25, 1e-11);
}

TEST(Quadrature, PiecewiseLinearHat)
{
  auto hat = [](double x) { return x < 1 ? x : 2 - x; };
  const auto r = quad::integrate_piecewise(hat, {0.0, 1.0, 2.0});
  EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(Quadrature, EmptyIntervalIsZeroAndReversedThrows)
{
  EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 1.0, 1.0).value, 0.0);
  EXPECT_THROW(quad::integrate([](double) { return 1.0; }, 1.0, 0.0), ParameterError);
}

TEST(Quadrature, NonFiniteIntegrandThrows)
{
  EXPECT_THROW(quad::integrate([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0),
               NumericalError);
}

TEST(FiniteDifference, RichardsonOnExponential)
{
  auto f = [](double x) { return std::exp(3 * x); };
  EXPECT_NEAR(fd::derivative(f, 0.7), 3 * std::exp(2.1), 1e-8 * 3 * std::exp(2.1));
  EXPECT_DOUBLE_EQ(fd::default_step(0.5), 1e-6);
  EXPECT_DOUBLE_EQ(fd::default_step(-40.0), 4e-5);
}

TEST(Bisection, FindsSqrtTwo)
{
  const double r = roots::bisect([](double x) { return x * x - 2; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r, std::numbers::sqrt2, 1e-14);
}

TEST(Bisection, EndpointRootsAndBadBracket)
{
  EXPECT_EQ(roots::bisect([](double x) { return x; }, 0.0, 1.0), 0.0);
  EXPECT_THROW(roots::bisect([](double x) { return x * x + 1; }, -1.0, 1.0), NoRootError);
}
