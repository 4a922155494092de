#pragma once

#include <cmath>
#include <vector>

#include "pasw/swe_dynamics.hpp"

namespace pasw {

/// Planar flow-over-mountain case: opposing zonal jets in geostrophic
/// balance, with an isolated cone-shaped mountain switched on at t = 0.
struct CaseParams {
  double u0 = 20.0;               // m s^-1
  double jet_width = 4.0e7 / 16;  // m, e-folding half-width
  double b0 = 2000.0;             // m
  double r0 = 4.0e7 / 9;          // m
  double xc = 2.0e7;              // m
  double yc = 1.0e7;              // m, on the eastward jet axis
};

/// Signed periodic separation a - b wrapped into [-L/2, L/2).
inline double periodic_delta(double a, double b, double L) {
  double d = std::fmod(a - b, L);
  if (d < -0.5 * L) d += L;
  if (d >= 0.5 * L) d -= L;
  return d;
}

/// u(y) = u0 [exp(-(y-Ly/4)^2/w^2) - exp(-(y-3Ly/4)^2/w^2)], v = 0, and eta
/// from the discrete balance  i ky eta = -(f/g) u  mode by mode. Only the
/// kx = 0 column is populated and the mean of u and eta is removed, so the
/// result lies exactly in the kernel of L and of N.
inline State balanced_jet(const CaseParams& c, const SpectralGrid& grid, const PhysicsParams& p) {
  const int nx = grid.nx(), ny = grid.ny();
  const double ly = grid.ly();
  std::vector<double> profile(grid.points());
  for (int j = 0; j < ny; ++j) {
    const double d1 = periodic_delta(grid.y(j), 0.25 * ly, ly) / c.jet_width;
    const double d2 = periodic_delta(grid.y(j), 0.75 * ly, ly) / c.jet_width;
    const double u = c.u0 * (std::exp(-d1 * d1) - std::exp(-d2 * d2));
    for (int i = 0; i < nx; ++i) profile[static_cast<std::size_t>(i) * ny + j] = u;
  }
  const Field2D full = grid.to_spectral(profile);

  State s = State::zeros(grid);
  const auto& ky = grid.dky();
  for (int j = 1; j < ny; ++j) {
    if (!grid.dealias_mask(0, j)) continue;
    s.u(0, j) = full(0, j);
    s.eta(0, j) = cplx(0.0, p.f / p.g) * s.u(0, j) / ky[j];
  }
  return s;
}

/// Cone height b0 (1 - min(r, r0) / r0) at offset (dx, dy) from the centre.
inline double cone_height(const CaseParams& c, double dx, double dy) {
  return c.b0 * (1.0 - std::min(std::hypot(dx, dy), c.r0) / c.r0);
}

/// Cone sampled at the grid points using periodic distance to the centre,
/// then dealiased once.
inline Field2D mountain(const CaseParams& c, const SpectralGrid& grid) {
  std::vector<double> b(grid.points());
  for (int i = 0; i < grid.nx(); ++i) {
    const double dx = periodic_delta(grid.x(i), c.xc, grid.lx());
    for (int j = 0; j < grid.ny(); ++j)
      b[static_cast<std::size_t>(i) * grid.ny() + j] = cone_height(c, dx, periodic_delta(grid.y(j), c.yc, grid.ly()));
  }
  return grid.dealias(grid.to_spectral(b));
}

/// Largest negative excursion of b in physical space (Gibbs undershoot), m.
inline double mountain_undershoot(const SpectralGrid& grid, const Field2D& b) {
  const auto phys = grid.to_physical(b);
  double m = 0.0;
  for (double x : phys) m = std::max(m, -x);
  return m;
}

inline void validate_case(const CaseParams& c, const SpectralGrid& grid, const PhysicsParams& p) {
  if (!(c.b0 > 0.0 && c.b0 < p.H)) throw Error("mountain height must satisfy 0 < b0 < H");
  if (!(c.r0 > 0.0 && c.r0 < 0.5 * std::min(grid.lx(), grid.ly())))
    throw Error("mountain radius must satisfy 0 < r0 < min(Lx, Ly)/2");
  if (!(c.jet_width > 0.0)) throw Error("jet_width must be positive");
  if (!std::isfinite(c.u0) || !std::isfinite(c.xc) || !std::isfinite(c.yc)) throw Error("case parameters must be finite");
}

}  // namespace pasw
