#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pasw/averaging.hpp"
#include "pasw/diagnostics.hpp"
#include "pasw/parallel.hpp"
#include "pasw/propagator.hpp"
#include "pasw/swe_dynamics.hpp"

namespace pasw {

struct StepConfig {
  double dt = 3600.0;
  Quadrature quadrature;
  PropagatorSpec propagator;
  bool nonlinear = true;  // false drops N entirely (pure linear problem)
};

/// Interval half-width the Chebyshev propagator needs for a step: the stage
/// formulas request shifts up to dt composed with averaging shifts up to T.
inline double required_lambda(double dt, double T, double lambda_max) {
  return lambda_max * std::max(dt, T + dt);
}

/// StepConfig for the given window, with the node count resolved by the
/// default rule when M is not given and the Chebyshev table sized for it.
inline StepConfig make_step_config(const SpectralGrid& grid, const PhysicsParams& params, double dt, double T,
                                   std::optional<int> M, const Kernel& kernel, PropagatorKind kind,
                                   double cheb_tol = 1e-10) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
  const double lmax = max_frequency(grid, params);
  StepConfig cfg;
  cfg.dt = dt;
  cfg.quadrature = kernel_weights(T, M.value_or(default_node_count(T, lmax)), kernel);
  cfg.propagator = make_propagator_spec(kind, required_lambda(dt, T, lmax), cheb_tol);
  return cfg;
}

/// Phase-averaged SSPRK3 in the original variables:
///   U1   = e^{L dt} [U^n + dt <N>(U^n)]
///   U2   = 3/4 e^{L dt/2} U^n + 1/4 e^{-L dt/2} [U1 + dt <N>(U1)]
///   U^n+1 = 1/3 e^{L dt} U^n + 2/3 e^{L dt/2} [U2 + dt <N>(U2)]
/// where <N>(U) = sum_k w_k e^{-L s_k} N(e^{L s_k} U).
class AveragedIntegrator {
 public:
  AveragedIntegrator(const SpectralGrid& grid, const PhysicsParams& params, StepConfig config,
                     WorkerPool* pool = nullptr)
      : grid_(&grid), params_(&params), config_(std::move(config)), prop_(grid, params, config_.propagator),
        pool_(pool) {
    if (!(config_.dt > 0.0) || !std::isfinite(config_.dt)) throw Error("dt must be positive");
  }

  const StepConfig& config() const { return config_; }
  const Propagator& propagator() const { return prop_; }

  State step(const State& un) const {
    const double dt = config_.dt;
    const State e_un = prop_.apply(dt, un);

    State x = un;
    x.axpy(dt, tendency(un));
    State u1 = prop_.apply(dt, x);
    check(u1, 1);

    x = u1;
    x.axpy(dt, tendency(u1));
    State u2 = prop_.apply(0.5 * dt, un);
    u2 *= 0.75;
    u2.axpy(0.25, prop_.apply(-0.5 * dt, x));
    check(u2, 2);

    x = u2;
    x.axpy(dt, tendency(u2));
    State next = e_un;
    next *= 1.0 / 3.0;
    next.axpy(2.0 / 3.0, prop_.apply(0.5 * dt, x));
    check(next, 3);
    next.t = un.t + dt;
    return next;
  }

 private:
  State tendency(const State& s) const {
    if (!config_.nonlinear) return State::zeros(*grid_, s.t);
    return averaged_tendency(s, config_.quadrature, *grid_, *params_, prop_, pool_);
  }

  static void check(const State& s, int stage) {
    if (!s.finite()) throw Error("non-finite values after stage " + std::to_string(stage));
  }

  const SpectralGrid* grid_;
  const PhysicsParams* params_;
  StepConfig config_;
  Propagator prop_;
  WorkerPool* pool_;
};

inline State step_averaged_ssprk3(const State& state, const StepConfig& config, const SpectralGrid& grid,
                                  const PhysicsParams& params, WorkerPool* pool = nullptr) {
  return AveragedIntegrator(grid, params, config, pool).step(state);
}

/// The unaveraged integrating-factor scheme with the exact exponential.
inline StepConfig reference_step_config(double dt_fine) {
  StepConfig cfg;
  cfg.dt = dt_fine;
  cfg.quadrature = Quadrature{};
  cfg.propagator = PropagatorSpec{};
  return cfg;
}

inline State step_reference(const State& state, double dt_fine, const SpectralGrid& grid,
                            const PhysicsParams& params, WorkerPool* pool = nullptr) {
  return step_averaged_ssprk3(state, reference_step_config(dt_fine), grid, params, pool);
}

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double max_speed = 0.0;
};

struct Trajectory {
  std::vector<State> snapshots;
  std::vector<DiagnosticsRow> series;
};

/// Number of whole steps of length dt in span; throws unless span is a
/// non-negative integer multiple of dt.
inline long whole_steps(double span, double dt, const std::string& what) {
  if (!(span >= 0.0) || !std::isfinite(span)) throw Error(what + " must be finite and >= 0");
  const double r = span / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r))
    throw Error(what + " = " + std::to_string(span) + " s is not a multiple of dt = " + std::to_string(dt) + " s");
  return static_cast<long>(n);
}

/// Steps from initial to t_end, keeping a snapshot (and its diagnostics)
/// every snapshot_every seconds plus the initial and final states.
/// on_snapshot, when given, sees each snapshot as it is taken.
inline Trajectory run(const State& initial, const AveragedIntegrator& integrator, double t_end,
                      double snapshot_every, const SpectralGrid& grid, const PhysicsParams& params,
                      const std::function<void(const State&, const DiagnosticsRow&)>& on_snapshot = {}) {
  const double dt = integrator.config().dt;
  const long steps = whole_steps(t_end, dt, "t_end");
  const long every = snapshot_every > 0.0 ? std::max(1L, whole_steps(snapshot_every, dt, "snapshot_every")) : steps;

  Trajectory traj;
  auto record = [&](const State& s) {
    const auto em = energy_mass(grid, params, s);
    DiagnosticsRow row{s.t, em.energy, em.mass, max_speed(grid, s)};
    traj.snapshots.push_back(s);
    traj.series.push_back(row);
    if (on_snapshot) on_snapshot(s, row);
  };

  State s = initial;
  record(s);
  for (long n = 1; n <= steps; ++n) {
    try {
      s = integrator.step(s);
    } catch (const Error& e) {
      throw Error("step " + std::to_string(n) + ": " + e.what());
    }
    s.t = initial.t + n * dt;
    if (n % every == 0 || n == steps) record(s);
  }
  return traj;
}

}  // namespace pasw
