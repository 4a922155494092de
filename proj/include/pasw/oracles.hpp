#pragma once

// Independent reference computations used by the test suites and by
// `pasw validate`. Nothing here is on a production code path.

#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "pasw/propagator.hpp"
#include "pasw/spectral_grid.hpp"
#include "pasw/swe_dynamics.hpp"

namespace pasw::oracle {

/// O(N^2) forward DFT with the library's normalization (1/(nx ny) forward).
inline Field2D direct_dft(int nx, int ny, const std::vector<double>& x) {
  Field2D out(nx, ny);
  for (int p = 0; p < nx; ++p)
    for (int q = 0; q < ny; ++q) {
      cplx acc = 0.0;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          const double ph = -2.0 * std::numbers::pi * (static_cast<double>(p) * i / nx + static_cast<double>(q) * j / ny);
          acc += x[static_cast<std::size_t>(i) * ny + j] * cplx(std::cos(ph), std::sin(ph));
        }
      out(p, q) = acc / static_cast<double>(nx * ny);
    }
  return out;
}

/// Non-aliased product coefficients (a b)^_k = sum_p a_p b_{k-p}, treating
/// the inputs as supported on the signed index box of the grid.
inline Field2D exact_convolution(const Field2D& a, const Field2D& b) {
  const int nx = a.nx(), ny = a.ny();
  Field2D out(nx, ny);
  auto in_box = [](int m, int n) { return m >= -n / 2 && m < n / 2; };
  auto slot = [](int m, int n) { return (m % n + n) % n; };
  for (int kx = -nx / 2; kx < nx / 2; ++kx)
    for (int ky = -ny / 2; ky < ny / 2; ++ky) {
      cplx acc = 0.0;
      for (int px = -nx / 2; px < nx / 2; ++px)
        for (int py = -ny / 2; py < ny / 2; ++py) {
          const int qx = kx - px, qy = ky - py;
          if (!in_box(qx, nx) || !in_box(qy, ny)) continue;
          acc += a(slot(px, nx), slot(py, ny)) * b(slot(qx, nx), slot(qy, ny));
        }
      out(slot(kx, nx), slot(ky, ny)) = acc;
    }
  return out;
}

/// Zero every mode outside |m| <= n/3 in both directions.
inline Field2D truncate_two_thirds(Field2D f) {
  const int nx = f.nx(), ny = f.ny();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (3 * std::abs(wrap_index(i, nx)) >= nx || 3 * std::abs(wrap_index(j, ny)) >= ny) f(i, j) = 0.0;
  return f;
}

/// N(U) by exact spectral convolution, truncated to the 2/3 band.
inline State nonlinear_by_convolution(const SpectralGrid& grid, const PhysicsParams& p, const State& s) {
  auto dx = [&](const Field2D& f) {
    Field2D o = f;
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j) o(i, j) *= cplx(0.0, grid.dkx()[i]);
    return o;
  };
  auto dy = [&](const Field2D& f) {
    Field2D o = f;
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j) o(i, j) *= cplx(0.0, grid.dky()[j]);
    return o;
  };
  Field2D d = s.eta;
  if (p.b.size() != 0) d -= p.b;
  State out;
  out.t = s.t;
  out.u = -1.0 * (exact_convolution(s.u, dx(s.u)) + exact_convolution(s.v, dy(s.u)));
  out.v = -1.0 * (exact_convolution(s.u, dx(s.v)) + exact_convolution(s.v, dy(s.v)));
  out.eta = -1.0 * (dx(exact_convolution(s.u, d)) + dy(exact_convolution(s.v, d)));
  out.u = truncate_two_thirds(out.u);
  out.v = truncate_two_thirds(out.v);
  out.eta = truncate_two_thirds(out.eta);
  return out;
}

/// L U by an explicit 3x3 complex matrix per wavevector.
inline State linear_by_mode_matrix(const SpectralGrid& grid, const PhysicsParams& p, const State& s) {
  State out = State::zeros(grid, s.t);
  const cplx I(0.0, 1.0);
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j) {
      const double kx = grid.dkx()[i], ky = grid.dky()[j];
      const cplx m[3][3] = {{0.0, p.f, -I * p.g * kx}, {-p.f, 0.0, -I * p.g * ky}, {-I * p.H * kx, -I * p.H * ky, 0.0}};
      const cplx x[3] = {s.u(i, j), s.v(i, j), s.eta(i, j)};
      cplx y[3] = {0.0, 0.0, 0.0};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) y[r] += m[r][c] * x[c];
      out.u(i, j) = y[0];
      out.v(i, j) = y[1];
      out.eta(i, j) = y[2];
    }
  return out;
}

/// J_k(x) from the standard library's special functions.
inline double bessel_j(int k, double x) { return std::cyl_bessel_j(static_cast<double>(k), x); }

/// Expected coefficient a_k = (2 - delta_k0) i^k J_k(lambda) of e^{i lambda x}.
inline cplx cheb_coefficient_bessel(int k, double lambda) {
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return (k == 0 ? 1.0 : 2.0) * ipow[k % 4] * bessel_j(k, lambda);
}

/// Textbook SSPRK3 on dV/dt = e^{-Lt} N(e^{Lt} V), mapped back to U at the
/// end. tn is the time of U^n.
inline State integrating_factor_ssprk3(const SpectralGrid& grid, const PhysicsParams& p, const State& un,
                                       double tn, double dt) {
  auto rhs = [&](const State& v, double t) {
    return exact_exp(-t, apply_nonlinear(grid, p, exact_exp(t, v, grid, p)), grid, p);
  };
  const State vn = exact_exp(-tn, un, grid, p);
  State x1 = vn;
  x1.axpy(dt, rhs(vn, tn));
  State x2 = x1;
  x2.axpy(dt, rhs(x1, tn + dt));
  x2 *= 0.25;
  x2.axpy(0.75, vn);
  State x3 = x2;
  x3.axpy(dt, rhs(x2, tn + 0.5 * dt));
  x3 *= 2.0 / 3.0;
  x3.axpy(1.0 / 3.0, vn);
  State out = exact_exp(tn + dt, x3, grid, p);
  out.t = un.t + dt;
  return out;
}

/// Real random field with independent samples in [-amp, amp].
inline Field2D random_field(const SpectralGrid& grid, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  std::vector<double> x(grid.points());
  for (auto& v : x) v = dist(rng);
  return grid.to_spectral(x);
}

/// Random real state with typical magnitudes (10 m/s, 100 m).
inline State random_state(const SpectralGrid& grid, std::mt19937_64& rng, bool band_limited = false) {
  State s{random_field(grid, rng, 10.0), random_field(grid, rng, 10.0), random_field(grid, rng, 100.0), 0.0};
  if (band_limited) {
    s.u = grid.dealias(s.u);
    s.v = grid.dealias(s.v);
    s.eta = grid.dealias(s.eta);
  }
  return s;
}

/// Relative energy-norm distance ||a - b||_E / ||b||_E.
inline double relative_energy_error(const SpectralGrid& grid, const PhysicsParams& p, const State& a, const State& b) {
  State d = a;
  d -= b;
  return energy_norm(grid, p, d) / energy_norm(grid, p, b);
}

/// max |a - b| over all coefficients of all fields, divided by max |b|.
inline double relative_max_error(const State& a, const State& b) {
  double num = 0.0, den = 0.0;
  for (auto [x, y] : {std::pair{&a.u, &b.u}, std::pair{&a.v, &b.v}, std::pair{&a.eta, &b.eta}}) {
    Field2D d = *x;
    d -= *y;
    num = std::max(num, max_abs(d));
    den = std::max(den, max_abs(*y));
  }
  return den == 0.0 ? num : num / den;
}

}  // namespace pasw::oracle
