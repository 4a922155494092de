#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pasw/spectral_grid.hpp"
#include "pasw/swe_dynamics.hpp"

namespace pasw {

enum class PropagatorKind { exact, chebyshev };

inline std::string to_string(PropagatorKind k) { return k == PropagatorKind::exact ? "exact" : "chebyshev"; }

/// How e^{Lt} is evaluated. lambda is the dimensionless half-width of the
/// approximation interval i[-lambda, lambda]; it must cover |t| * lambda_max
/// for every argument the propagator is asked for.
struct PropagatorSpec {
  PropagatorKind kind = PropagatorKind::exact;
  double lambda = 0.0;
  int n_poly = 1;
  double tol = 1e-10;
};

/// Coefficients a_k of e^{l} ~ sum_k a_k P_k(l) on l in i[-lambda, lambda],
/// with P_0 = 1, P_1(l) = -i l / lambda, P_{k+1} = 2 l P_k / (i lambda) - P_{k-1}.
/// For l = i y the P_k reduce to T_k(y / lambda), which makes
/// a_k = (2 - delta_k0) i^k J_k(lambda): even k real, odd k imaginary.
struct ChebCoeffs {
  double lambda = 0.0;
  std::vector<cplx> a;

  int n_poly() const { return static_cast<int>(a.size()) - 1; }
};

/// Interpolates e^{i lambda x} at Chebyshev points and reads off the
/// coefficients with a DCT-II. The sample count is padded well past
/// n_poly + lambda so aliased Bessel tails are below round-off.
inline ChebCoeffs cheb_coeffs(double lambda, int n_poly) {
  if (n_poly < 1) throw Error("n_poly must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be finite and >= 0");
  const int nq = n_poly + static_cast<int>(std::ceil(lambda)) + 65;
  std::vector<double> re(nq), im(nq), re_hat(nq), im_hat(nq);
  for (int j = 0; j < nq; ++j) {
    const double x = std::cos(std::numbers::pi * (j + 0.5) / nq);
    re[j] = std::cos(lambda * x);
    im[j] = std::sin(lambda * x);
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan plan = fftw_plan_r2r_1d(nq, re.data(), re_hat.data(), FFTW_REDFT10, FFTW_ESTIMATE);
    fftw_execute_r2r(plan, re.data(), re_hat.data());
    fftw_execute_r2r(plan, im.data(), im_hat.data());
    fftw_destroy_plan(plan);
  }
  ChebCoeffs out;
  out.lambda = lambda;
  out.a.resize(n_poly + 1);
  for (int k = 0; k <= n_poly; ++k) {
    const double s = (k == 0 ? 0.5 : 1.0) / nq;
    out.a[k] = cplx(re_hat[k] * s, im_hat[k] * s);
  }
  return out;
}

/// Smallest N >= 1 whose discarded tail sum_{k>N} |a_k| is below tol.
inline int choose_npoly(double lambda, double tol) {
  if (!(tol > 0.0)) throw Error("tol must be positive");
  // Bessel tails fall off on a (lambda/2)^{1/3} scale; about 9 lambda^{1/3}
  // past lambda they reach 1e-12, so this length leaves ample room.
  const int generous = static_cast<int>(std::ceil(lambda + 16.0 * std::cbrt(lambda) + 80.0));
  const auto c = cheb_coeffs(lambda, generous);
  double tail = 0.0;
  int n = generous;
  for (int k = generous; k >= 1; --k) {
    if (tail + std::abs(c.a[k]) >= tol) break;
    tail += std::abs(c.a[k]);
    n = k - 1;
  }
  return std::max(n, 1);
}

inline PropagatorSpec make_propagator_spec(PropagatorKind kind, double lambda, double tol = 1e-10) {
  PropagatorSpec spec{kind, lambda, 1, tol};
  if (kind == PropagatorKind::chebyshev) spec.n_poly = choose_npoly(lambda, tol);
  return spec;
}

/// Per-mode scalars of e^{Lt} = I + a L + b L^2 for one t, where
/// a = sin(wt)/w and b = (1 - cos wt)/w^2 (limits t and t^2/2 at w = 0).
struct ExpTable {
  double t = 0.0;
  std::vector<double> a;
  std::vector<double> b;
};

inline ExpTable exp_table(double t, const SpectralGrid& grid, const PhysicsParams& p) {
  ExpTable tab;
  tab.t = t;
  tab.a.resize(grid.points());
  tab.b.resize(grid.points());
  const auto& kx = grid.dkx();
  const auto& ky = grid.dky();
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const std::size_t n = static_cast<std::size_t>(i) * grid.ny() + j;
      const double w = dispersion_omega(kx[i], ky[j], p);
      if (w * std::abs(t) < 1e-300) {
        tab.a[n] = t;
        tab.b[n] = 0.5 * t * t;
      } else {
        const double h = std::sin(0.5 * w * t);
        tab.a[n] = std::sin(w * t) / w;
        tab.b[n] = 2.0 * h * h / (w * w);
      }
    }
  }
  return tab;
}

/// Applies a precomputed exponential table; see exact_exp.
inline State apply_exp_table(const ExpTable& tab, const State& s, const SpectralGrid& grid, const PhysicsParams& p) {
  require_state(grid, s);
  State out = s;
  out.t = s.t + tab.t;
  if (tab.t == 0.0) return out;
  const int ny = grid.ny();
  const auto& kx = grid.dkx();
  const auto& ky = grid.dky();
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < ny; ++j) {
      const std::size_t n = static_cast<std::size_t>(i) * ny + j;
      const cplx u = s.u[n], v = s.v[n], e = s.eta[n];
      const cplx ikx(0.0, kx[i]), iky(0.0, ky[j]);
      // L x
      const cplx lu = p.f * v - p.g * ikx * e;
      const cplx lv = -p.f * u - p.g * iky * e;
      const cplx le = -p.H * (ikx * u + iky * v);
      // L (L x)
      const cplx llu = p.f * lv - p.g * ikx * le;
      const cplx llv = -p.f * lu - p.g * iky * le;
      const cplx lle = -p.H * (ikx * lu + iky * lv);
      const double a = tab.a[n], b = tab.b[n];
      out.u[n] = u + a * lu + b * llu;
      out.v[n] = v + a * lv + b * llv;
      out.eta[n] = e + a * le + b * lle;
    }
  }
  return out;
}

/// e^{Lt} applied mode by mode in closed form. Each 3x3 block satisfies
/// L^3 = -w^2 L, so e^{Lt} = I + sin(wt)/w L + (1 - cos wt)/w^2 L^2.
inline State exact_exp(double t, const State& s, const SpectralGrid& grid, const PhysicsParams& p) {
  if (t == 0.0) {
    require_state(grid, s);
    return s;
  }
  return apply_exp_table(exp_table(t, grid, p), s, grid, p);
}

/// Largest accepted non-Hermitian residual of a Chebyshev result, relative.
inline constexpr double kChebRealnessTol = 1e-9;

/// Matrix-free Chebyshev evaluation of e^{Lt} U using only apply_linear.
/// Throws when |t| * lambda_max exceeds the coefficient interval.
inline State cheb_exp(double t, const State& s, const SpectralGrid& grid, const PhysicsParams& p,
                      const ChebCoeffs& coeffs, double lambda_max) {
  require_state(grid, s);
  const double lambda = coeffs.lambda;
  const double need = std::abs(t) * lambda_max;
  if (need > lambda * (1.0 + 1e-12))
    throw Error("Chebyshev interval too small: |t| * lambda_max = " + std::to_string(need) +
                " exceeds lambda = " + std::to_string(lambda));
  State out = s;
  out.t = s.t + t;
  if (t == 0.0) return out;
  if (lambda == 0.0) {
    out *= coeffs.a[0];
    out.t = s.t + t;
    return out;
  }
  const double scale = t / lambda;
  const cplx step(0.0, -2.0 * scale);  // 2 t / (i lambda)

  State prev = s;
  State cur = apply_linear(grid, p, s);
  cur *= cplx(0.0, -scale);
  out *= coeffs.a[0];
  out.axpy(coeffs.a[1], cur);
  for (int k = 1; k < coeffs.n_poly(); ++k) {
    State next = apply_linear(grid, p, cur);
    next *= step;
    next -= prev;
    out.axpy(coeffs.a[k + 1], next);
    prev = std::move(cur);
    cur = std::move(next);
  }

  for (Field2D* f : {&out.u, &out.v, &out.eta}) {
    const double scale_f = max_abs(*f);
    const auto res = hermitian_residual(*f);
    if (res.value > kChebRealnessTol * scale_f)
      throw Error("Chebyshev result not real: residual " + std::to_string(res.value / scale_f) +
                  " at mode (" + std::to_string(wrap_index(res.i, grid.nx())) + ", " +
                  std::to_string(wrap_index(res.j, grid.ny())) + ")");
    project_hermitian(*f);
  }
  out.t = s.t + t;
  return out;
}

/// The run-time selectable exponential. Holds the coefficient table for
/// its spec; immutable and shareable across threads.
class Propagator {
 public:
  Propagator(const SpectralGrid& grid, const PhysicsParams& params, PropagatorSpec spec)
      : grid_(&grid), params_(&params), spec_(spec), lambda_max_(max_frequency(grid, params)) {
    if (spec_.kind == PropagatorKind::chebyshev) coeffs_ = cached_coeffs(spec_.lambda, spec_.n_poly);
  }

  const PropagatorSpec& spec() const { return spec_; }
  double lambda_max() const { return lambda_max_; }
  const ChebCoeffs* coeffs() const { return coeffs_.get(); }

  State apply(double t, const State& s) const {
    if (spec_.kind == PropagatorKind::exact) {
      if (t == 0.0) return exact_exp(t, s, *grid_, *params_);
      return apply_exp_table(*table_for(t), s, *grid_, *params_);
    }
    return cheb_exp(t, s, *grid_, *params_, *coeffs_, lambda_max_);
  }

 private:
  // An integrator asks for a handful of distinct t (+-s_k, dt, +-dt/2).
  static constexpr std::size_t kMaxTables = 128;

  std::shared_ptr<const ExpTable> table_for(double t) const {
    {
      std::lock_guard lock(tables_->m);
      auto it = tables_->by_t.find(t);
      if (it != tables_->by_t.end()) return it->second;
    }
    auto tab = std::make_shared<const ExpTable>(exp_table(t, *grid_, *params_));
    std::lock_guard lock(tables_->m);
    if (tables_->by_t.size() < kMaxTables) tables_->by_t.emplace(t, tab);
    return tab;
  }

  struct TableCache {
    std::mutex m;
    std::map<double, std::shared_ptr<const ExpTable>> by_t;
  };

  static std::shared_ptr<const ChebCoeffs> cached_coeffs(double lambda, int n_poly) {
    static std::mutex m;
    static std::map<std::pair<double, int>, std::shared_ptr<const ChebCoeffs>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[{lambda, n_poly}];
    if (!slot) slot = std::make_shared<const ChebCoeffs>(cheb_coeffs(lambda, n_poly));
    return slot;
  }

  const SpectralGrid* grid_;
  const PhysicsParams* params_;
  PropagatorSpec spec_;
  double lambda_max_;
  std::shared_ptr<const ChebCoeffs> coeffs_;
  std::shared_ptr<TableCache> tables_ = std::make_shared<TableCache>();
};

}  // namespace pasw
