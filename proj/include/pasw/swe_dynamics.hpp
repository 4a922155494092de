#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pasw/spectral_grid.hpp"

namespace pasw {

/// f-plane shallow water coefficients. Topography b is spectral and only
/// enters the nonlinear flux.
struct PhysicsParams {
  double f = 1e-4;    // s^-1
  double g = 9.8;     // m s^-2
  double H = 5960.0;  // m
  Field2D b;          // m; empty means flat bottom
};

/// Prognostic fields (u, v, eta) in spectral form plus model time.
struct State {
  Field2D u;
  Field2D v;
  Field2D eta;
  double t = 0.0;

  static State zeros(const SpectralGrid& grid, double t = 0.0) {
    return {grid.zeros(), grid.zeros(), grid.zeros(), t};
  }

  State& operator+=(const State& o) {
    u += o.u;
    v += o.v;
    eta += o.eta;
    return *this;
  }
  State& operator-=(const State& o) {
    u -= o.u;
    v -= o.v;
    eta -= o.eta;
    return *this;
  }
  State& operator*=(double a) {
    u *= a;
    v *= a;
    eta *= a;
    return *this;
  }
  State& operator*=(cplx a) {
    u *= a;
    v *= a;
    eta *= a;
    return *this;
  }
  State& axpy(double a, const State& x) {
    u.axpy(a, x.u);
    v.axpy(a, x.v);
    eta.axpy(a, x.eta);
    return *this;
  }
  State& axpy(cplx a, const State& x) {
    u.axpy(a, x.u);
    v.axpy(a, x.v);
    eta.axpy(a, x.eta);
    return *this;
  }

  bool finite() const { return all_finite(u) && all_finite(v) && all_finite(eta); }
  bool operator==(const State&) const = default;
};

inline void require_state(const SpectralGrid& grid, const State& s) {
  grid.require(s.u);
  grid.require(s.v);
  grid.require(s.eta);
}

inline Field2D topography_or_zero(const SpectralGrid& grid, const PhysicsParams& p) {
  return p.b.size() == 0 ? grid.zeros() : p.b;
}

/// Checks g > 0, H > 0, b real and b < H everywhere.
inline void validate_params(const SpectralGrid& grid, const PhysicsParams& p) {
  if (!(p.g > 0.0) || !std::isfinite(p.g)) throw Error("g must be positive");
  if (!(p.H > 0.0) || !std::isfinite(p.H)) throw Error("H must be positive");
  if (!std::isfinite(p.f)) throw Error("f must be finite");
  if (p.b.size() != 0) {
    const auto phys = grid.to_physical(p.b);
    if (*std::max_element(phys.begin(), phys.end()) >= p.H)
      throw Error("topography must stay below the mean depth H");
  }
}

/// L U for the f-plane: (f v - g eta_x, -f u - g eta_y, -H (u_x + v_y)).
inline State apply_linear(const SpectralGrid& grid, const PhysicsParams& p, const State& s) {
  require_state(grid, s);
  const int nx = grid.nx(), ny = grid.ny();
  const auto& kx = grid.dkx();
  const auto& ky = grid.dky();
  State out = State::zeros(grid, s.t);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const cplx u = s.u(i, j), v = s.v(i, j), e = s.eta(i, j);
      const cplx ikx(0.0, kx[i]), iky(0.0, ky[j]);
      out.u(i, j) = p.f * v - p.g * ikx * e;
      out.v(i, j) = -p.f * u - p.g * iky * e;
      out.eta(i, j) = -p.H * (ikx * u + iky * v);
    }
  }
  return out;
}

/// N(U): advection of momentum and flux divergence of u (eta - b).
/// Products are taken in physical space and the result is 2/3-dealiased.
inline State apply_nonlinear(const SpectralGrid& grid, const PhysicsParams& p, const State& s) {
  require_state(grid, s);
  const auto u = grid.to_physical(s.u);
  const auto v = grid.to_physical(s.v);
  const auto ux = grid.to_physical(grid.ddx(s.u));
  const auto uy = grid.to_physical(grid.ddy(s.u));
  const auto vx = grid.to_physical(grid.ddx(s.v));
  const auto vy = grid.to_physical(grid.ddy(s.v));
  const auto d = grid.to_physical(p.b.size() == 0 ? s.eta : s.eta - p.b);

  const std::size_t n = grid.points();
  std::vector<double> adv_u(n), adv_v(n), flux_x(n), flux_y(n);
  for (std::size_t q = 0; q < n; ++q) {
    adv_u[q] = -(u[q] * ux[q] + v[q] * uy[q]);
    adv_v[q] = -(u[q] * vx[q] + v[q] * vy[q]);
    flux_x[q] = u[q] * d[q];
    flux_y[q] = v[q] * d[q];
  }

  State out;
  out.t = s.t;
  out.u = grid.dealias(grid.to_spectral(adv_u));
  out.v = grid.dealias(grid.to_spectral(adv_v));
  Field2D div = grid.ddx(grid.to_spectral(flux_x));
  div += grid.ddy(grid.to_spectral(flux_y));
  out.eta = grid.dealias(std::move(div));
  out.eta *= -1.0;
  // i*0 keeps the mean mode zero already; pin it against signed zeros.
  out.eta(0, 0) = 0.0;
  return out;
}

/// Inertia-gravity frequency sqrt(f^2 + g H |k|^2).
inline double dispersion_omega(double kx, double ky, const PhysicsParams& p) {
  return std::sqrt(p.f * p.f + p.g * p.H * (kx * kx + ky * ky));
}

/// Largest dispersion frequency over every grid wavenumber, Nyquist included.
inline double max_frequency(const SpectralGrid& grid, const PhysicsParams& p) {
  double m = 0.0;
  for (double kx : grid.kx())
    for (double ky : grid.ky()) m = std::max(m, dispersion_omega(kx, ky, p));
  return m;
}

/// Energy inner product  integral of H (u u' + v v') + g eta eta'  via Parseval.
/// The real part is returned; for real fields the imaginary part vanishes.
inline double energy_inner(const SpectralGrid& grid, const PhysicsParams& p, const State& a, const State& b) {
  require_state(grid, a);
  require_state(grid, b);
  double sum = 0.0;
  for (std::size_t n = 0; n < a.u.size(); ++n) {
    sum += p.H * (a.u[n] * std::conj(b.u[n])).real();
    sum += p.H * (a.v[n] * std::conj(b.v[n])).real();
    sum += p.g * (a.eta[n] * std::conj(b.eta[n])).real();
  }
  return sum * grid.lx() * grid.ly();
}

inline double energy_norm(const SpectralGrid& grid, const PhysicsParams& p, const State& a) {
  return std::sqrt(energy_inner(grid, p, a, a));
}

}  // namespace pasw
