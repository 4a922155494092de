#pragma once

#include <cmath>
#include <utility>

#include "pasw/swe_dynamics.hpp"

namespace pasw {

/// Final-time comparison against a reference solution.
struct ErrorReport {
  double l2_eta = 0.0;        // ||eta - eta_ref|| / ||eta_ref||
  double l2_u = 0.0;          // same for the vector field (u, v)
  double linf_eta = 0.0;      // m
  double energy_drift = 0.0;  // |E_end - E_0| / |E_0| of the tested run
  double mass_drift = 0.0;
};

struct NormalizedL2 {
  double eta = 0.0;
  double u = 0.0;
};

/// Physical-space domain L2 errors of test against reference, normalized by
/// the reference norms. The cell area cancels in the ratio.
inline NormalizedL2 l2_error_normalized(const SpectralGrid& grid, const State& test, const State& ref) {
  require_state(grid, test);
  require_state(grid, ref);
  const auto et = grid.to_physical(test.eta), er = grid.to_physical(ref.eta);
  const auto ut = grid.to_physical(test.u), ur = grid.to_physical(ref.u);
  const auto vt = grid.to_physical(test.v), vr = grid.to_physical(ref.v);
  double de = 0.0, ne = 0.0, du = 0.0, nu = 0.0;
  for (std::size_t q = 0; q < grid.points(); ++q) {
    de += (et[q] - er[q]) * (et[q] - er[q]);
    ne += er[q] * er[q];
    du += (ut[q] - ur[q]) * (ut[q] - ur[q]) + (vt[q] - vr[q]) * (vt[q] - vr[q]);
    nu += ur[q] * ur[q] + vr[q] * vr[q];
  }
  if (ne == 0.0) throw Error("reference eta has zero norm; normalized error undefined");
  if (nu == 0.0) throw Error("reference velocity has zero norm; normalized error undefined");
  return {std::sqrt(de / ne), std::sqrt(du / nu)};
}

inline double linf_eta_error(const SpectralGrid& grid, const State& test, const State& ref) {
  const auto et = grid.to_physical(test.eta), er = grid.to_physical(ref.eta);
  double m = 0.0;
  for (std::size_t q = 0; q < et.size(); ++q) m = std::max(m, std::abs(et[q] - er[q]));
  return m;
}

struct EnergyMass {
  double energy = 0.0;  // m^5 s^-2 (energy per unit density)
  double mass = 0.0;    // m^3
};

/// mass   = integral of h,  h = H + eta - b
/// energy = integral of 1/2 h (u^2 + v^2) + 1/2 g eta^2
/// The potential part is measured from the rest state eta = 0, which is the
/// form conserved by these equations with topography.
inline EnergyMass energy_mass(const SpectralGrid& grid, const PhysicsParams& p, const State& s) {
  require_state(grid, s);
  const auto u = grid.to_physical(s.u);
  const auto v = grid.to_physical(s.v);
  const auto eta = grid.to_physical(s.eta);
  std::vector<double> b(grid.points(), 0.0);
  if (p.b.size() != 0) b = grid.to_physical(p.b);
  double e = 0.0, m = 0.0;
  for (std::size_t q = 0; q < grid.points(); ++q) {
    const double h = p.H + eta[q] - b[q];
    m += h;
    e += 0.5 * h * (u[q] * u[q] + v[q] * v[q]) + 0.5 * p.g * eta[q] * eta[q];
  }
  return {e * grid.cell_area(), m * grid.cell_area()};
}

inline double max_speed(const SpectralGrid& grid, const State& s) {
  const auto u = grid.to_physical(s.u);
  const auto v = grid.to_physical(s.v);
  double m = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) m = std::max(m, std::hypot(u[q], v[q]));
  return m;
}

inline double relative_drift(double now, double then) {
  return then == 0.0 ? std::abs(now) : std::abs(now - then) / std::abs(then);
}

inline ErrorReport error_report(const SpectralGrid& grid, const PhysicsParams& p, const State& initial,
                                const State& final_state, const State& ref) {
  ErrorReport r;
  const auto l2 = l2_error_normalized(grid, final_state, ref);
  r.l2_eta = l2.eta;
  r.l2_u = l2.u;
  r.linf_eta = linf_eta_error(grid, final_state, ref);
  const auto e0 = energy_mass(grid, p, initial);
  const auto e1 = energy_mass(grid, p, final_state);
  r.energy_drift = relative_drift(e1.energy, e0.energy);
  r.mass_drift = relative_drift(e1.mass, e0.mass);
  return r;
}

}  // namespace pasw
