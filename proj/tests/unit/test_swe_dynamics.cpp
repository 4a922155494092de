#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "pasw/oracles.hpp"
#include "pasw/swe_dynamics.hpp"
#include "pasw/testcase.hpp"

using namespace pasw;
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_state_abs(const State& s) { return std::max({max_abs(s.u), max_abs(s.v), max_abs(s.eta)}); }

}  // namespace

TEST(SweDynamics, LinearOfZeroIsZero) {
  const SpectralGrid g(8, 8, 1e6, 1e6);
  const PhysicsParams p;
  EXPECT_EQ(max_state_abs(apply_linear(g, p, State::zeros(g))), 0.0);
}

TEST(SweDynamics, GeostrophicSingleModeHasNoZonalTendency) {
  const SpectralGrid g(16, 16, 1e6, 1e6);
  const PhysicsParams p;
  State s = State::zeros(g);
  const int i = 3;
  s.eta(i, 0) = cplx(0.7, -0.2);
  s.eta(16 - i, 0) = std::conj(s.eta(i, 0));
  for (int n : {i, 16 - i}) s.v(n, 0) = cplx(0.0, 1.0) * p.g * g.kx()[n] * s.eta(n, 0) / p.f;
  const State t = apply_linear(g, p, s);
  EXPECT_LT(max_abs(t.u), 1e-15 * p.g * g.kx()[i]);
}

TEST(SweDynamics, LinearMatchesPerModeMatrix) {
  const SpectralGrid g(16, 12, 2e6, 3e6);
  const PhysicsParams p;
  std::mt19937_64 rng(21);
  const State s = oracle::random_state(g, rng);
  EXPECT_LT(oracle::relative_max_error(apply_linear(g, p, s), oracle::linear_by_mode_matrix(g, p, s)), 1e-13);
}

TEST(SweDynamics, LinearIsSkewAdjointInEnergyProduct) {
  const SpectralGrid g(32, 32, 4e7, 4e7);
  const PhysicsParams p;
  std::mt19937_64 rng(22);
  const State a = oracle::random_state(g, rng), b = oracle::random_state(g, rng);
  const double lhs = energy_inner(g, p, apply_linear(g, p, a), b);
  const double rhs = -energy_inner(g, p, a, apply_linear(g, p, b));
  const double scale = energy_norm(g, p, apply_linear(g, p, a)) * energy_norm(g, p, b);
  EXPECT_NEAR(lhs, rhs, 1e-12 * scale);
}

TEST(SweDynamics, LinearIsLinear) {
  const SpectralGrid g(16, 16, 1e6, 1e6);
  const PhysicsParams p;
  std::mt19937_64 rng(23);
  const State a = oracle::random_state(g, rng), b = oracle::random_state(g, rng);
  State combo = a;
  combo *= 2.5;
  combo.axpy(-0.75, b);
  State expected = apply_linear(g, p, a);
  expected *= 2.5;
  expected.axpy(-0.75, apply_linear(g, p, b));
  EXPECT_LT(oracle::relative_max_error(apply_linear(g, p, combo), expected), 1e-14);
}

TEST(SweDynamics, NonlinearOfRestIsZero) {
  const SpectralGrid g(16, 16, 1e6, 1e6);
  std::mt19937_64 rng(24);
  PhysicsParams p;
  p.b = g.dealias(oracle::random_field(g, rng, 100.0));
  State s = State::zeros(g);
  s.eta = oracle::random_field(g, rng, 10.0);
  EXPECT_EQ(max_state_abs(apply_nonlinear(g, p, s)), 0.0);
}

TEST(SweDynamics, NonlinearOfZonalFlowIsZero) {
  const SpectralGrid g(32, 32, 4e7, 4e7);
  const PhysicsParams p;
  const State s = balanced_jet(CaseParams{}, g, p);
  const State t = apply_nonlinear(g, p, s);
  EXPECT_LT(max_state_abs(t), 1e-25);
}

TEST(SweDynamics, NonlinearMatchesConvolutionOracle) {
  const SpectralGrid g(8, 8, 2e6, 3e6);
  std::mt19937_64 rng(25);
  PhysicsParams p{1e-4, 9.8, 100.0, {}};
  p.b = g.dealias(oracle::random_field(g, rng, 5.0));
  for (int n = 0; n < 4; ++n) {
    const State s = oracle::random_state(g, rng, true);
    EXPECT_LT(oracle::relative_max_error(apply_nonlinear(g, p, s), oracle::nonlinear_by_convolution(g, p, s)), 1e-12);
  }
}

TEST(SweDynamics, NonlinearConservesMass) {
  const SpectralGrid g(32, 32, 4e7, 4e7);
  std::mt19937_64 rng(26);
  PhysicsParams p;
  p.b = g.dealias(oracle::random_field(g, rng, 100.0));
  const State t = apply_nonlinear(g, p, oracle::random_state(g, rng));
  EXPECT_EQ(t.eta(0, 0), cplx(0.0));
  EXPECT_LT(hermitian_residual(t.u).value, 1e-15 * max_abs(t.u));
}

TEST(SweDynamics, GridMismatchIsRejected) {
  const SpectralGrid g(8, 8, 1.0, 1.0), h(16, 16, 1.0, 1.0);
  const PhysicsParams p;
  EXPECT_THROW(apply_linear(g, p, State::zeros(h)), Error);
  EXPECT_THROW(apply_nonlinear(g, p, State::zeros(h)), Error);
}

TEST(SweDynamics, DispersionExamples) {
  EXPECT_DOUBLE_EQ(dispersion_omega(0.0, 0.0, PhysicsParams{1e-4, 9.8, 5960.0, {}}), 1e-4);
  EXPECT_DOUBLE_EQ(dispersion_omega(0.0, 2.0, PhysicsParams{0.0, 1.0, 1.0, {}}), 2.0);
  const PhysicsParams p{1e-4, 9.8, 5960.0, {}};
  const double k = 1.5708e-7;
  const double w = dispersion_omega(k, 0.0, p);
  EXPECT_NEAR(w, 1.0696e-4, 5e-9);
  // +-i w are roots of lambda^3 + (f^2 + g H k^2) lambda.
  const std::complex<double> l(0.0, w);
  EXPECT_LT(std::abs(l * l * l + (p.f * p.f + p.g * p.H * k * k) * l), 1e-24);
}

TEST(SweDynamics, MaxFrequencyOnNyquistCorner) {
  const SpectralGrid g(8, 8, kTwoPi, kTwoPi);
  EXPECT_DOUBLE_EQ(max_frequency(g, PhysicsParams{0.0, 1.0, 1.0, {}}), 4.0 * std::sqrt(2.0));
  EXPECT_NEAR(max_frequency(g, PhysicsParams{1e3, 1e-6, 1.0, {}}), 1e3, 1e-6);
}

TEST(SweDynamics, MaxFrequencyMatchesExhaustiveScan) {
  const SpectralGrid g(64, 64, 4e7, 4e7);
  const PhysicsParams p;
  double scan = 0.0;
  for (int i = -32; i < 32; ++i)
    for (int j = -32; j < 32; ++j) {
      const double kx = kTwoPi * i / 4e7, ky = kTwoPi * j / 4e7;
      scan = std::max(scan, std::sqrt(p.f * p.f + p.g * p.H * (kx * kx + ky * ky)));
    }
  EXPECT_NEAR(max_frequency(g, p), scan, 1e-15 * scan);
}

TEST(SweDynamics, ParamsValidation) {
  const SpectralGrid g(16, 16, 1e6, 1e6);
  EXPECT_THROW(validate_params(g, PhysicsParams{1e-4, 0.0, 100.0, {}}), Error);
  EXPECT_THROW(validate_params(g, PhysicsParams{1e-4, 9.8, -1.0, {}}), Error);
  std::vector<double> tall(g.points(), 0.0);
  tall[5] = 200.0;
  EXPECT_THROW(validate_params(g, PhysicsParams{1e-4, 9.8, 100.0, g.to_spectral(tall)}), Error);
  EXPECT_NO_THROW(validate_params(g, PhysicsParams{1e-4, 9.8, 100.0, {}}));
}
