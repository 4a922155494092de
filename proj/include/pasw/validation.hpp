#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pasw/harness.hpp"
#include "pasw/oracles.hpp"

namespace pasw::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs body, filling passed/detail, and enforces the time budget (seconds,
/// 0 = none). Exceptions count as failures.
inline CheckResult timed_check(const std::string& name, double budget,
                               const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget > 0 && r.seconds > budget) {
    r.passed = false;
    r.detail += " [over time budget " + std::to_string(budget) + " s]";
  }
  return r;
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// The default 64^2 flow-over-mountain model.
inline Model default_model() { return build_model(RunConfig{}); }

/// Perturbation of one Chebyshev coefficient, for mutation testing.
struct ChebTamper {
  int k = 0;
  cplx delta = 0.0;
};

/// cheb_exp vs exact_exp at t = 3600 s with lambda = lambda_max * 3600 on
/// 10 random states; relative energy-norm error <= 1e-10, under 10 s.
inline CheckResult check_cheb_fidelity(std::optional<ChebTamper> tamper = {}, std::uint64_t seed = 1) {
  return timed_check("chebyshev exponential vs exact", 10.0, [&](CheckResult& r) {
    const Model m = default_model();
    const double t = 3600.0;
    const double lmax = max_frequency(m.grid, m.params);
    const double lambda = lmax * t;
    ChebCoeffs coeffs = cheb_coeffs(lambda, choose_npoly(lambda, 1e-10));
    if (tamper) coeffs.a.at(tamper->k) += tamper->delta;
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int n = 0; n < 10; ++n) {
      const State s = oracle::random_state(m.grid, rng);
      const State approx = cheb_exp(t, s, m.grid, m.params, coeffs, lmax);
      const State exact = exact_exp(t, s, m.grid, m.params);
      worst = std::max(worst, oracle::relative_energy_error(m.grid, m.params, approx, exact));
    }
    r.passed = worst <= 1e-10;
    r.detail = "n_poly = " + std::to_string(coeffs.n_poly()) + ", max rel. energy error " + sci(worst) + " (<= 1e-10)";
  });
}

/// Identity, group law, inverse and isometry of exact_exp, each <= 1e-12.
inline CheckResult check_exponential_group(std::uint64_t seed = 2) {
  return timed_check("exponential identity/group/inverse/isometry", 5.0, [&](CheckResult& r) {
    const Model m = default_model();
    const auto& g = m.grid;
    const auto& p = m.params;
    std::mt19937_64 rng(seed);
    double worst_id = 0, worst_group = 0, worst_inv = 0, worst_iso = 0;
    for (int n = 0; n < 3; ++n) {
      const State s = oracle::random_state(g, rng);
      const double t1 = 1234.5 * (n + 1), t2 = -777.25 + 5000.0 * n;
      worst_id = std::max(worst_id, oracle::relative_energy_error(g, p, exact_exp(0.0, s, g, p), s));
      const State a = exact_exp(t1 + t2, s, g, p);
      const State b = exact_exp(t1, exact_exp(t2, s, g, p), g, p);
      worst_group = std::max(worst_group, oracle::relative_energy_error(g, p, b, a));
      worst_inv = std::max(worst_inv, oracle::relative_energy_error(g, p, exact_exp(-t1, exact_exp(t1, s, g, p), g, p), s));
      const double e0 = energy_norm(g, p, s);
      worst_iso = std::max(worst_iso, std::abs(energy_norm(g, p, exact_exp(t1, s, g, p)) - e0) / e0);
    }
    r.passed = worst_id <= 1e-12 && worst_group <= 1e-12 && worst_inv <= 1e-12 && worst_iso <= 1e-12;
    r.detail = "identity " + sci(worst_id) + ", group " + sci(worst_group) + ", inverse " + sci(worst_inv) +
               ", isometry " + sci(worst_iso) + " (each <= 1e-12)";
  });
}

/// One averaged SSPRK3 step with N switched off equals exact_exp(dt):
/// <= 1e-12 with the exact propagator, <= 1e-9 with Chebyshev (tol 1e-10).
inline CheckResult check_linear_exactness(std::uint64_t seed = 3) {
  return timed_check("pure-linear step exactness", 0.0, [&](CheckResult& r) {
    const Model m = default_model();
    std::mt19937_64 rng(seed);
    State s = m.initial;
    s += oracle::random_state(m.grid, rng, true);
    const double dt = 3600.0;
    const State target = exact_exp(dt, s, m.grid, m.params);
    double err[2];
    int n = 0;
    for (auto kind : {PropagatorKind::exact, PropagatorKind::chebyshev}) {
      StepConfig sc = make_step_config(m.grid, m.params, dt, 3600.0, std::nullopt, bump_kernel(), kind, 1e-10);
      sc.nonlinear = false;
      err[n++] = oracle::relative_energy_error(m.grid, m.params, step_averaged_ssprk3(s, sc, m.grid, m.params), target);
    }
    r.passed = err[0] <= 1e-12 && err[1] <= 1e-9;
    r.detail = "exact " + sci(err[0]) + " (<= 1e-12), chebyshev " + sci(err[1]) + " (<= 1e-9)";
  });
}

/// Least-squares slope of log(error) against log(dt).
inline double fitted_order(const std::vector<double>& dts, const std::vector<double>& errs) {
  const std::size_t n = dts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline State integrate(const Model& m, const StepConfig& sc, double t_end, WorkerPool* pool = nullptr) {
  const AveragedIntegrator it(m.grid, m.params, sc, pool);
  State s = m.initial;
  const long steps = whole_steps(t_end, sc.dt, "t_end");
  for (long n = 0; n < steps; ++n) s = it.step(s);
  return s;
}

/// T = 0 runs over dt = 900, 450, 225 s for 6 h against dt = 30 s; fitted
/// order in eta >= 2.7, under 2 minutes.
inline CheckResult check_convergence_order() {
  return timed_check("third-order convergence (T = 0)", 120.0, [&](CheckResult& r) {
    const Model m = default_model();
    const double t_end = 6 * 3600.0;
    const State ref = integrate(m, reference_step_config(30.0), t_end);
    std::vector<double> dts{900.0, 450.0, 225.0}, errs;
    for (double dt : dts) errs.push_back(l2_error_normalized(m.grid, integrate(m, reference_step_config(dt), t_end), ref).eta);
    const double order = fitted_order(dts, errs);
    r.passed = order >= 2.7;
    r.detail = "errors " + sci(errs[0]) + ", " + sci(errs[1]) + ", " + sci(errs[2]) + "; fitted order " +
               std::to_string(order) + " (>= 2.7)";
  });
}

/// Balanced double jet without topography over 100 steps of 1 h, T in
/// {0, 3600 s}: normalized L2 drift in eta <= 1e-10, under a minute.
inline CheckResult check_steady_jet(WorkerPool* pool = nullptr) {
  return timed_check("steady balanced jet", 60.0, [&](CheckResult& r) {
    RunConfig c;
    Model m = build_model(c);
    m.params.b = Field2D{};
    m.initial = balanced_jet(m.case_params, m.grid, m.params);
    double worst = 0.0;
    for (double T : {0.0, 3600.0}) {
      const StepConfig sc = make_step_config(m.grid, m.params, 3600.0, T, std::nullopt, bump_kernel(), PropagatorKind::exact);
      const State end = integrate(m, sc, 100 * 3600.0, pool);
      worst = std::max(worst, l2_error_normalized(m.grid, end, m.initial).eta);
    }
    r.passed = worst <= 1e-10;
    r.detail = "max eta drift " + sci(worst) + " (<= 1e-10)";
  });
}

/// Per-step change of mean eta over a 1-day averaged run (T = dt = 1 h),
/// relative to the RMS of the initial eta; <= 1e-13.
inline CheckResult check_mass_conservation(WorkerPool* pool = nullptr) {
  return timed_check("mass conservation", 0.0, [&](CheckResult& r) {
    const Model m = default_model();
    const StepConfig sc = make_step_config(m.grid, m.params, 3600.0, 3600.0, std::nullopt, bump_kernel(), PropagatorKind::exact);
    const AveragedIntegrator it(m.grid, m.params, sc, pool);
    auto mean_and_rms = [&](const State& s) {
      const auto eta = m.grid.to_physical(s.eta);
      double sum = 0.0, sq = 0.0;
      for (double x : eta) {
        sum += x;
        sq += x * x;
      }
      return std::pair{sum / eta.size(), std::sqrt(sq / eta.size())};
    };
    State s = m.initial;
    auto [mean0, rms0] = mean_and_rms(s);
    const double scale = std::max(std::abs(mean0), rms0);
    double prev = mean0, worst = 0.0;
    for (int n = 0; n < 24; ++n) {
      s = it.step(s);
      const double mean = mean_and_rms(s).first;
      worst = std::max(worst, std::abs(mean - prev) / scale);
      prev = mean;
    }
    r.passed = worst <= 1e-13;
    r.detail = "max per-step relative change of mean eta " + sci(worst) + " (<= 1e-13)";
  });
}

/// apply_nonlinear vs exact convolution (8x8) <= 1e-12; apply_linear vs
/// per-mode 3x3 matrix <= 1e-13; cheb_coeffs vs Bessel series <= 1e-12.
inline CheckResult check_oracle_equivalences(std::uint64_t seed = 4) {
  return timed_check("oracle equivalences", 0.0, [&](CheckResult& r) {
    const SpectralGrid small(8, 8, 2.0e6, 3.0e6);
    PhysicsParams p{1e-4, 9.8, 100.0, {}};
    std::mt19937_64 rng(seed);
    p.b = small.dealias(oracle::random_field(small, rng, 5.0));
    double e_nl = 0.0, e_lin = 0.0;
    for (int n = 0; n < 5; ++n) {
      const State s = oracle::random_state(small, rng, true);
      e_nl = std::max(e_nl, oracle::relative_max_error(apply_nonlinear(small, p, s), oracle::nonlinear_by_convolution(small, p, s)));
      const State full = oracle::random_state(small, rng);
      e_lin = std::max(e_lin, oracle::relative_max_error(apply_linear(small, p, full), oracle::linear_by_mode_matrix(small, p, full)));
    }
    double e_cheb = 0.0;
    for (double lambda : {0.0, 1.0, 5.0, 12.5}) {
      const auto c = cheb_coeffs(lambda, 40);
      for (int k = 0; k <= 40; ++k) e_cheb = std::max(e_cheb, std::abs(c.a[k] - oracle::cheb_coefficient_bessel(k, lambda)));
    }
    r.passed = e_nl <= 1e-12 && e_lin <= 1e-13 && e_cheb <= 1e-12;
    r.detail = "nonlinear " + sci(e_nl) + " (<= 1e-12), linear " + sci(e_lin) + " (<= 1e-13), chebyshev " + sci(e_cheb) +
               " (<= 1e-12)";
  });
}

/// to_physical(to_spectral(x)) = x to 1e-13 relative for random fields.
inline CheckResult check_transform_roundtrip(std::uint64_t seed = 5) {
  return timed_check("transform round-trip", 0.0, [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (auto [nx, ny] : {std::pair{8, 8}, std::pair{64, 64}, std::pair{10, 12}}) {
      const SpectralGrid g(nx, ny, 1.0, 2.0);
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      std::vector<double> x(g.points());
      for (auto& v : x) v = d(rng);
      const auto y = g.to_physical(g.to_spectral(x));
      double num = 0.0, den = 0.0;
      for (std::size_t q = 0; q < x.size(); ++q) {
        num = std::max(num, std::abs(y[q] - x[q]));
        den = std::max(den, std::abs(x[q]));
      }
      worst = std::max(worst, num / den);
    }
    r.passed = worst <= 1e-13;
    r.detail = "max relative error " + sci(worst) + " (<= 1e-13)";
  });
}

/// The default sweep windows, in seconds: 0, 0.5, 1, 2, 4, 8 hours.
inline std::vector<double> default_windows() { return {0.0, 1800.0, 3600.0, 7200.0, 14400.0, 28800.0}; }

/// Interior minimum strictly below both endpoints, for eta and for u.
inline CheckResult check_optimal_window(const std::vector<SweepRow>& rows) {
  return timed_check("optimal averaging window (U-curve)", 0.0, [&](CheckResult& r) {
    if (rows.size() < 3) throw Error("sweep needs at least three windows");
    auto interior = [&](bool vel) {
      const std::size_t k = argmin_error(rows, vel);
      auto err = [&](std::size_t n) { return vel ? rows[n].l2_u : rows[n].l2_eta; };
      const bool ok = k > 0 && k + 1 < rows.size() && err(k) < err(0) && err(k) < err(rows.size() - 1);
      return std::pair{ok, k};
    };
    const auto [eta_ok, ke] = interior(false);
    const auto [u_ok, ku] = interior(true);
    std::ostringstream os;
    os << "eta:";
    for (const auto& row : rows) os << " " << sci(row.l2_eta);
    os << " (min at T = " << rows[ke].T << " s); u:";
    for (const auto& row : rows) os << " " << sci(row.l2_u);
    os << " (min at T = " << rows[ku].T << " s)";
    r.passed = eta_ok && u_ok;
    r.detail = os.str();
  });
}

/// Lists regular files under dir whose contents must be reproducible:
/// everything except the execution record (config.resolved, timing.csv).
inline std::vector<fs::path> result_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "config.resolved" || name == "timing.csv") continue;
    out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline CheckResult check_identical_trees(const fs::path& a, const fs::path& b) {
  return timed_check("bitwise determinism across worker counts", 0.0, [&](CheckResult& r) {
    const auto fa = result_files(a), fb = result_files(b);
    if (fa != fb) {
      r.passed = false;
      r.detail = "file lists differ (" + std::to_string(fa.size()) + " vs " + std::to_string(fb.size()) + ")";
      return;
    }
    for (const auto& f : fa) {
      if (read_text(a / f) != read_text(b / f)) {
        r.passed = false;
        r.detail = "contents differ: " + f.string();
        return;
      }
    }
    r.passed = !fa.empty();
    r.detail = std::to_string(fa.size()) + " files identical";
  });
}

struct SweepCheck {
  CheckResult optimal_window;
  CheckResult determinism;
};

/// 15-day 64^2 sweep over the default windows run with 8 workers and with
/// 1 worker in separate directories under scratch: the U-curve is checked
/// on the first, and all result files are compared between the two.
inline SweepCheck check_sweep(const fs::path& scratch, std::ostream& log) {
  std::vector<SweepRow> rows8, rows1;
  auto one = [&](unsigned workers, std::vector<SweepRow>& rows) {
    RunConfig c;
    c.workers = static_cast<int>(workers);
    c.output_dir = (scratch / ("sweep_w" + std::to_string(workers))).string();
    fs::remove_all(c.output_dir);
    WorkerPool pool(workers);
    std::ostringstream quiet;
    const int code = cmd_sweep(c, default_windows(), pool, quiet, &rows);
    log << quiet.str();
    if (code != kExitOk) throw Error("sweep with " + std::to_string(workers) + " workers exited " + std::to_string(code));
    return fs::path(c.output_dir);
  };
  SweepCheck out;
  fs::path d8, d1;
  const auto start = std::chrono::steady_clock::now();
  try {
    d8 = one(8, rows8);
  } catch (const std::exception& e) {
    out.optimal_window = {"optimal averaging window (U-curve)", false, e.what(), 0.0};
    out.determinism = {"bitwise determinism across worker counts", false, "sweep did not run", 0.0};
    return out;
  }
  const double t8 = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.optimal_window = check_optimal_window(rows8);
  out.optimal_window.seconds = t8;
  const auto start1 = std::chrono::steady_clock::now();
  try {
    d1 = one(1, rows1);
    out.determinism = check_identical_trees(d8, d1);
  } catch (const std::exception& e) {
    out.determinism = {"bitwise determinism across worker counts", false, e.what(), 0.0};
  }
  out.determinism.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start1).count();
  return out;
}

inline void print_result(std::ostream& os, const std::string& label, const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%7.2fs", r.seconds);
  os << (r.passed ? "PASS" : "FAIL") << "  " << label << "  " << r.name << "  [" << buf << "]  " << r.detail << "\n";
}

enum class Level { fast, full };

/// Runs the oracle suites; full adds the 15-day sweep experiment.
/// Returns the results in criterion order with labels.
inline std::vector<std::pair<std::string, CheckResult>> run_all(Level level, unsigned workers, std::ostream& log,
                                                                const fs::path& scratch) {
  std::vector<std::pair<std::string, CheckResult>> out;
  WorkerPool pool(workers);
  auto add = [&](const std::string& label, CheckResult r) {
    print_result(log, label, r);
    log.flush();
    out.emplace_back(label, std::move(r));
  };
  add("[1]", check_cheb_fidelity());
  add("[2]", check_exponential_group());
  add("[3]", check_linear_exactness());
  add("[4]", check_convergence_order());
  add("[5]", check_steady_jet(&pool));
  if (level == Level::full) {
    auto sweep = check_sweep(scratch, log);
    add("[6]", sweep.optimal_window);
    add("[7]", sweep.determinism);
  }
  add("[8]", check_mass_conservation(&pool));
  add("[9]", check_oracle_equivalences());
  add("[+]", check_transform_roundtrip());
  return out;
}

}  // namespace pasw::validation

namespace pasw {

/// `validate` subcommand: pass/fail table, exit 1 on any failure.
inline int cmd_validate(validation::Level level, unsigned workers, std::ostream& log = std::cout,
                        const fs::path& scratch = fs::temp_directory_path() / "pasw-validate") {
  const auto results = validation::run_all(level, workers, log, scratch);
  std::size_t failed = 0;
  for (const auto& [label, r] : results) failed += r.passed ? 0 : 1;
  log << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace pasw
