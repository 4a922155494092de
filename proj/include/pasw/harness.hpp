#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pasw/averaging.hpp"
#include "pasw/config.hpp"
#include "pasw/diagnostics.hpp"
#include "pasw/integrator.hpp"
#include "pasw/io.hpp"
#include "pasw/parallel.hpp"
#include "pasw/testcase.hpp"

namespace pasw {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

/// Grid, physics and initial condition built from a RunConfig.
struct Model {
  SpectralGrid grid;
  PhysicsParams params;
  CaseParams case_params;
  State initial;
};

inline Model build_model(const RunConfig& c) {
  Model m{SpectralGrid(c.nx, c.ny, c.Lx, c.Ly), PhysicsParams{c.f, c.g, c.H, {}}, {}, {}};
  m.case_params = CaseParams{c.u0, c.jet_width, c.b0, c.r0, c.xc, c.yc};
  validate_case(m.case_params, m.grid, m.params);
  m.params.b = mountain(m.case_params, m.grid);
  validate_params(m.grid, m.params);
  m.initial = balanced_jet(m.case_params, m.grid, m.params);
  return m;
}

inline int resolve_M(const RunConfig& c, double T, double lambda_max) {
  if (T == 0.0) return 0;
  return c.M ? *c.M : default_node_count(T, lambda_max);
}

inline StepConfig averaged_step_config(const RunConfig& c, const Model& m, double T) {
  const double lmax = max_frequency(m.grid, m.params);
  return make_step_config(m.grid, m.params, c.dt, T, resolve_M(c, T, lmax), kernel_by_name(c.kernel), c.propagator,
                          c.cheb_tol);
}

namespace detail {

inline void require_valid(const RunConfig& c) {
  validate_config(c, [](const char*) { return std::string("config"); });
}

inline std::string step_prefix(double t, double dt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06ld", std::lround(t / dt));
  return buf;
}

inline std::string window_dir_name(double T) { return "T_" + fmt_double(T); }

/// Runs one integration writing snapshots (if snapshot_every > 0), the
/// final state and the diagnostics series into dir.
inline Trajectory integrate_to_dir(const fs::path& dir, const Model& m, const AveragedIntegrator& integrator,
                                   double t_end, double snapshot_every) {
  fs::create_directories(dir);
  const double dt = integrator.config().dt;
  if (snapshot_every > 0) fs::create_directories(dir / "snapshots");
  auto on_snapshot = [&](const State& s, const DiagnosticsRow&) {
    if (snapshot_every > 0) write_state(dir / "snapshots", step_prefix(s.t, dt), m.grid, s);
  };
  Trajectory traj = run(m.initial, integrator, t_end, snapshot_every, m.grid, m.params, on_snapshot);
  // Only the final state is needed by callers.
  State final_state = std::move(traj.snapshots.back());
  traj.snapshots.clear();
  traj.snapshots.push_back(std::move(final_state));
  write_state(dir, "final", m.grid, traj.snapshots.back());
  write_text(dir / "diagnostics.csv", diagnostics_csv(traj.series));
  return traj;
}

inline State load_reference_final(const fs::path& ref_dir, const SpectralGrid& grid, double t_end) {
  State ref = read_state(ref_dir, "final", grid);
  if (std::abs(ref.t - t_end) > 1e-9 * std::max(1.0, t_end))
    throw Error("reference in '" + ref_dir.string() + "' ends at t = " + fmt_double(ref.t) + " s, expected " +
                fmt_double(t_end) + " s");
  return ref;
}

}  // namespace detail

/// Averaged-model run: snapshots, final state, diagnostics, and an error
/// report when config.reference names a reference directory.
inline int cmd_run(const RunConfig& c, WorkerPool& pool, std::ostream& log = std::cout) {
  const fs::path dir = c.output_dir;
  try {
    detail::require_valid(c);
    fs::create_directories(dir);
    const Model m = build_model(c);
    const StepConfig sc = averaged_step_config(c, m, c.T);
    write_text(dir / "config.resolved", resolved_text(c, sc.quadrature.M));
    const AveragedIntegrator integrator(m.grid, m.params, sc, &pool);
    const Trajectory traj = detail::integrate_to_dir(dir, m, integrator, c.t_end, c.snapshot_every);
    log << "run: T = " << c.T << " s, M = " << sc.quadrature.M << ", " << traj.series.size() - 1
        << " diagnostics rows written to " << dir.string() << "\n";
    if (!c.reference.empty()) {
      const State ref = detail::load_reference_final(c.reference, m.grid, c.t_end);
      const ErrorReport rep = error_report(m.grid, m.params, m.initial, traj.snapshots.back(), ref);
      write_text(dir / "error_report.csv", error_report_csv(rep));
      log << "run: l2_eta = " << rep.l2_eta << ", l2_u = " << rep.l2_u << "\n";
    }
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

/// Fine-timestep unaveraged run stored for later comparisons.
inline int cmd_reference(const RunConfig& c, WorkerPool& pool, std::ostream& log = std::cout) {
  const fs::path dir = c.output_dir;
  try {
    detail::require_valid(c);
    fs::create_directories(dir);
    write_text(dir / "config.resolved", resolved_text(c));
    const Model m = build_model(c);
    const AveragedIntegrator integrator(m.grid, m.params, reference_step_config(c.dt_reference), &pool);
    const Trajectory traj = detail::integrate_to_dir(dir, m, integrator, c.t_end, c.snapshot_every);
    log << "reference: dt = " << c.dt_reference << " s, energy drift "
        << relative_drift(traj.series.back().energy, traj.series.front().energy) << "\n";
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "reference failed: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct SweepRow {
  double T = 0.0;
  int M = 0;
  double l2_eta = std::numeric_limits<double>::infinity();
  double l2_u = std::numeric_limits<double>::infinity();
  std::string status = "ok";
  double wall_time_s = 0.0;

  bool ok() const { return status == "ok"; }
};

/// Index of the smallest error; failed runs count as infinitely wrong.
inline std::size_t argmin_error(const std::vector<SweepRow>& rows, bool velocity) {
  std::size_t best = 0;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const double a = velocity ? rows[n].l2_u : rows[n].l2_eta;
    const double b = velocity ? rows[best].l2_u : rows[best].l2_eta;
    if (a < b) best = n;
  }
  return best;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "T_seconds,M,l2_eta,l2_u,status\n";
  for (const auto& r : rows) {
    out += csv_number(r.T) + "," + std::to_string(r.M) + "," + csv_number(r.l2_eta) + "," + csv_number(r.l2_u) + "," +
           r.status + "\n";
  }
  return out;
}

inline std::string timing_csv(const std::vector<SweepRow>& rows) {
  std::string out = "T_seconds,wall_time_s\n";
  for (const auto& r : rows) out += csv_number(r.T) + "," + csv_number(r.wall_time_s) + "\n";
  return out;
}

/// Error-versus-window experiment. Uses config.reference when given,
/// otherwise first computes the reference into output_dir/reference.
/// Runs execute concurrently on the pool; each writes its own T_<T>/ dir.
inline int cmd_sweep(const RunConfig& c, const std::vector<double>& t_list, WorkerPool& pool,
                     std::ostream& log = std::cout, std::vector<SweepRow>* rows_out = nullptr) {
  const fs::path dir = c.output_dir;
  std::vector<SweepRow> rows(t_list.size());
  try {
    if (t_list.empty()) throw ConfigError("--tlist must name at least one window");
    for (double T : t_list)
      if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("--tlist entries must be finite and >= 0");
    detail::require_valid(c);
    fs::create_directories(dir);
    write_text(dir / "config.resolved", resolved_text(c));
    const Model m = build_model(c);

    fs::path ref_dir = c.reference;
    if (ref_dir.empty()) {
      ref_dir = dir / "reference";
      RunConfig rc = c;
      rc.output_dir = ref_dir.string();
      rc.snapshot_every = 0.0;
      const int rcode = cmd_reference(rc, pool, log);
      if (rcode != kExitOk) return rcode;
    }
    const State ref = detail::load_reference_final(ref_dir, m.grid, c.t_end);

    pool.parallel_for(t_list.size(), [&](std::size_t n) {
      SweepRow& row = rows[n];
      row.T = t_list[n];
      const auto start = std::chrono::steady_clock::now();
      try {
        const StepConfig sc = averaged_step_config(c, m, row.T);
        row.M = sc.quadrature.M;
        const AveragedIntegrator integrator(m.grid, m.params, sc, &pool);
        const auto traj = detail::integrate_to_dir(dir / detail::window_dir_name(row.T), m, integrator, c.t_end, 0.0);
        const auto e = l2_error_normalized(m.grid, traj.snapshots.back(), ref);
        row.l2_eta = e.eta;
        row.l2_u = e.u;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
          if (ch == ',' || ch == '\n') ch = ';';
        row.status = "failed: " + msg;
      }
      row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    write_text(dir / "sweep.csv", sweep_csv(rows));
    write_text(dir / "timing.csv", timing_csv(rows));
    for (const auto& r : rows)
      log << "sweep: T = " << r.T << " s, M = " << r.M << ", l2_eta = " << r.l2_eta << ", l2_u = " << r.l2_u << " ("
          << r.status << ")\n";
    log << "sweep: eta-optimal T = " << rows[argmin_error(rows, false)].T
        << " s, u-optimal T = " << rows[argmin_error(rows, true)].T << " s\n";
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "sweep failed: " << e.what() << "\n";
    return kExitFailure;
  }
  if (rows_out) *rows_out = rows;
  return kExitOk;
}

}  // namespace pasw
