#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pasw/oracles.hpp"
#include "pasw/propagator.hpp"

using namespace pasw;
namespace {

/// sum_k a_k P_k(l) by the scalar form of the operator recurrence.
cplx cheb_sum(const ChebCoeffs& c, cplx l) {
  const cplx I(0.0, 1.0);
  cplx prev = 1.0, cur = -I * l / c.lambda;
  cplx sum = c.a[0] * prev + c.a[1] * cur;
  for (int k = 1; k < c.n_poly(); ++k) {
    const cplx next = 2.0 * l / (I * c.lambda) * cur - prev;
    sum += c.a[k + 1] * next;
    prev = cur;
    cur = next;
  }
  return sum;
}

struct DefaultCase : ::testing::Test {
  SpectralGrid grid{64, 64, 4e7, 4e7};
  PhysicsParams params;
};

}  // namespace

TEST_F(DefaultCase, ExactExpAtZeroIsIdentity) {
  std::mt19937_64 rng(31);
  const State s = oracle::random_state(grid, rng);
  const State out = exact_exp(0.0, s, grid, params);
  EXPECT_EQ(out.u, s.u);
  EXPECT_EQ(out.v, s.v);
  EXPECT_EQ(out.eta, s.eta);
}

TEST_F(DefaultCase, ExactExpRotatesMeanVelocity) {
  State s = State::zeros(grid, 10.0);
  s.u(0, 0) = 3.0;
  s.v(0, 0) = -2.0;
  s.eta(0, 0) = 5.0;
  const double t = std::numbers::pi / (2.0 * params.f);
  const State out = exact_exp(t, s, grid, params);
  // du/dt = f v, dv/dt = -f u: a quarter turn sends (u, v) to (v, -u).
  EXPECT_NEAR(std::abs(out.u(0, 0) - cplx(-2.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(out.v(0, 0) - cplx(-3.0)), 0.0, 1e-12);
  EXPECT_EQ(out.eta(0, 0), cplx(5.0));
  EXPECT_DOUBLE_EQ(out.t, 10.0 + t);
}

TEST_F(DefaultCase, ExactExpGroupInverseIsometry) {
  std::mt19937_64 rng(32);
  const State s = oracle::random_state(grid, rng);
  for (auto [t1, t2] : {std::pair{600.0, 3000.0}, std::pair{-1800.0, 86400.0}, std::pair{1e5, -3.3e4}}) {
    const State ab = exact_exp(t1 + t2, s, grid, params);
    const State a_b = exact_exp(t1, exact_exp(t2, s, grid, params), grid, params);
    EXPECT_LT(oracle::relative_energy_error(grid, params, a_b, ab), 1e-12);
    EXPECT_LT(oracle::relative_energy_error(grid, params, exact_exp(-t1, exact_exp(t1, s, grid, params), grid, params), s),
              1e-12);
    const double e0 = energy_norm(grid, params, s);
    EXPECT_NEAR(energy_norm(grid, params, ab), e0, 1e-12 * e0);
  }
}

TEST_F(DefaultCase, ExactExpSolvesLinearOde) {
  // Centered difference of e^{Lt} U in t against L e^{Lt} U.
  std::mt19937_64 rng(33);
  const State s = oracle::random_state(grid, rng);
  const double t = 1234.0, h = 1e-2;
  State d = exact_exp(t + h, s, grid, params);
  d -= exact_exp(t - h, s, grid, params);
  d *= 1.0 / (2.0 * h);
  const State rhs = apply_linear(grid, params, exact_exp(t, s, grid, params));
  EXPECT_LT(oracle::relative_energy_error(grid, params, d, rhs), 1e-7);
}

TEST(ChebCoeffs, ZeroLambdaIsConstant) {
  const auto c = cheb_coeffs(0.0, 6);
  EXPECT_NEAR(std::abs(c.a[0] - cplx(1.0)), 0.0, 1e-15);
  for (int k = 1; k <= 6; ++k) EXPECT_LT(std::abs(c.a[k]), 1e-15);
}

TEST(ChebCoeffs, MatchBesselSeriesAtFive) {
  const auto c = cheb_coeffs(5.0, 40);
  for (int k = 0; k <= 40; ++k) {
    // Power series for J_k(5), summed independently of the library oracle.
    double term = 1.0;
    for (int n = 1; n <= k; ++n) term *= 2.5 / n;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= -6.25 / (static_cast<double>(m) * (m + k));
      sum += term;
    }
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx expected = (k == 0 ? 1.0 : 2.0) * ipow[k % 4] * sum;
    EXPECT_LT(std::abs(c.a[k] - expected), 1e-12) << "k = " << k;
  }
}

TEST(ChebCoeffs, EvenRealOddImaginary) {
  const auto c = cheb_coeffs(23.7, 60);
  for (int k = 0; k <= 60; ++k) EXPECT_LT(std::abs(k % 2 == 0 ? c.a[k].imag() : c.a[k].real()), 1e-15);
}

TEST(ChebCoeffs, ScalarExpansionReproducesExponential) {
  std::mt19937_64 rng(34);
  for (double lambda : {1.0, 10.0, 20.0, 37.5}) {
    const int n = static_cast<int>(std::ceil(lambda + 2.0 * std::cbrt(lambda) + 20.0));
    const auto c = cheb_coeffs(lambda, n);
    std::uniform_real_distribution<double> d(-lambda, lambda);
    double worst = 0.0;
    for (int m = 0; m < 200; ++m) {
      const cplx l(0.0, d(rng));
      worst = std::max(worst, std::abs(cheb_sum(c, l) - std::exp(l)));
    }
    EXPECT_LT(worst, 1e-10) << "lambda = " << lambda;
  }
}

TEST(ChebCoeffs, ChosenLengthReproducesExponentialForLargeLambda) {
  std::mt19937_64 rng(39);
  for (double lambda : {120.0, 400.0, 1000.0}) {
    const auto c = cheb_coeffs(lambda, choose_npoly(lambda, 1e-10));
    std::uniform_real_distribution<double> d(-lambda, lambda);
    double worst = 0.0;
    for (int m = 0; m < 200; ++m) {
      const cplx l(0.0, d(rng));
      worst = std::max(worst, std::abs(cheb_sum(c, l) - std::exp(l)));
    }
    EXPECT_LT(worst, 1e-10) << "lambda = " << lambda;
  }
}

TEST(ChooseNpoly, Examples) {
  EXPECT_EQ(choose_npoly(0.0, 1e-10), 1);
  const int n = choose_npoly(10.0, 1e-10);
  EXPECT_GE(n, 15);
  EXPECT_LE(n, 29);
  std::mt19937_64 rng(35);
  const auto c = cheb_coeffs(10.0, n);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int m = 0; m < 200; ++m) {
    const cplx l(0.0, d(rng));
    EXPECT_LE(std::abs(cheb_sum(c, l) - std::exp(l)), 1e-10);
  }
}

TEST(ChooseNpoly, MonotoneInToleranceAndBounded) {
  // The additive bound holds over the windows this model uses (lambda up
  // to ~60 at T = 8 h); the true excess grows like 9 lambda^{1/3}.
  for (double lambda : {0.5, 3.0, 10.0, 50.0, 100.0}) {
    const int tight = choose_npoly(lambda, 1e-12), loose = choose_npoly(lambda, 1e-6);
    EXPECT_GE(tight, loose);
    EXPECT_LE(tight, lambda + 2.0 * std::cbrt(lambda) + 40.0);
  }
  for (double lambda : {300.0, 1000.0}) {
    EXPECT_GE(choose_npoly(lambda, 1e-12), choose_npoly(lambda, 1e-6));
    EXPECT_LE(choose_npoly(lambda, 1e-12), lambda + 12.0 * std::cbrt(lambda) + 40.0);
  }
  EXPECT_THROW(choose_npoly(1.0, 0.0), Error);
}

TEST_F(DefaultCase, ChebExpMatchesExact) {
  const double t = 3600.0, lmax = max_frequency(grid, params);
  const auto c = cheb_coeffs(lmax * t, choose_npoly(lmax * t, 1e-10));
  std::mt19937_64 rng(36);
  for (double tt : {t, -t, 0.37 * t}) {
    const State s = oracle::random_state(grid, rng);
    const State approx = cheb_exp(tt, s, grid, params, c, lmax);
    EXPECT_LT(oracle::relative_energy_error(grid, params, approx, exact_exp(tt, s, grid, params)), 1e-10);
    EXPECT_DOUBLE_EQ(approx.t, s.t + tt);
  }
}

TEST_F(DefaultCase, ChebExpAtZeroIsIdentity) {
  const double lmax = max_frequency(grid, params);
  const auto c = cheb_coeffs(lmax * 3600.0, 30);
  std::mt19937_64 rng(37);
  const State s = oracle::random_state(grid, rng);
  EXPECT_LT(oracle::relative_energy_error(grid, params, cheb_exp(0.0, s, grid, params, c, lmax), s), 1e-12);
}

TEST_F(DefaultCase, ChebExpAtIntervalEndpoint) {
  // Fastest resolved mode placed exactly at the end of the interval.
  const int i = 31, j = 31;
  const double w = dispersion_omega(grid.dkx()[i], grid.dky()[j], params);
  const double t = 3600.0, lambda = w * t;
  const auto c = cheb_coeffs(lambda, choose_npoly(lambda, 1e-10));
  State s = State::zeros(grid);
  s.eta(i, j) = cplx(3.0, 1.0);
  s.eta(64 - i, 64 - j) = std::conj(s.eta(i, j));
  s.u(i, j) = cplx(-0.5, 2.0);
  s.u(64 - i, 64 - j) = std::conj(s.u(i, j));
  const State approx = cheb_exp(t, s, grid, params, c, w);
  EXPECT_LT(oracle::relative_energy_error(grid, params, approx, exact_exp(t, s, grid, params)), 1e-9);
}

TEST_F(DefaultCase, ChebExpRejectsShortInterval) {
  const double lmax = max_frequency(grid, params);
  const auto c = cheb_coeffs(lmax * 1800.0, 40);
  EXPECT_THROW(cheb_exp(3600.0, State::zeros(grid), grid, params, c, lmax), Error);
  EXPECT_NO_THROW(cheb_exp(-1800.0, State::zeros(grid), grid, params, c, lmax));
}

TEST_F(DefaultCase, PropagatorKindsAgree) {
  const double lmax = max_frequency(grid, params);
  const Propagator exact(grid, params, make_propagator_spec(PropagatorKind::exact, lmax * 7200.0));
  const Propagator cheb(grid, params, make_propagator_spec(PropagatorKind::chebyshev, lmax * 7200.0, 1e-10));
  ASSERT_NE(cheb.coeffs(), nullptr);
  EXPECT_EQ(exact.coeffs(), nullptr);
  std::mt19937_64 rng(38);
  const State s = oracle::random_state(grid, rng);
  for (double t : {-7200.0, -1800.0, 0.0, 3600.0, 7200.0}) {
    const State a = exact.apply(t, s), b = cheb.apply(t, s);
    EXPECT_LT(oracle::relative_energy_error(grid, params, a, exact_exp(t, s, grid, params)), 1e-15);
    EXPECT_LT(oracle::relative_energy_error(grid, params, b, a), 1e-9) << "t = " << t;
  }
  EXPECT_THROW(cheb.apply(7300.0, s), Error);
}
