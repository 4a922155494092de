#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pasw/parallel.hpp"
#include "pasw/propagator.hpp"
#include "pasw/swe_dynamics.hpp"

namespace pasw {

/// Even, nonnegative weight function on [-1, 1].
struct Kernel {
  std::string name;
  std::function<double(double)> rho;
};

/// Smooth compactly supported bump exp(-1 / (1 - x^2)), zero at |x| = 1.
inline Kernel bump_kernel() {
  return {"bump", [](double x) {
            const double q = 1.0 - x * x;
            return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
          }};
}

inline Kernel constant_kernel() {
  return {"constant", [](double) { return 1.0; }};
}

inline Kernel kernel_by_name(const std::string& name) {
  if (name == "bump") return bump_kernel();
  if (name == "constant") return constant_kernel();
  throw Error("unknown kernel '" + name + "' (expected bump or constant)");
}

/// Uniform nodes s_k = k T / M, k = -M..M, with kernel-proportional weights
/// normalized to sum to one. Index n = k + M.
struct Quadrature {
  double T = 0.0;
  int M = 0;
  std::vector<double> s{0.0};
  std::vector<double> w{1.0};

  std::size_t nodes() const { return s.size(); }
};

inline Quadrature kernel_weights(double T, int M, const Kernel& kernel) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error("averaging window T must be finite and >= 0");
  if (M < 0) throw Error("node half-count M must be >= 0");
  if (T == 0.0 && M != 0) throw Error("T = 0 requires M = 0");
  Quadrature q;
  q.T = T;
  q.M = M;
  q.s.assign(2 * M + 1, 0.0);
  q.w.assign(2 * M + 1, 0.0);
  if (M == 0) {
    q.w[0] = 1.0;
    return q;
  }
  double total = 0.0;
  for (int k = -M; k <= M; ++k) {
    // Symmetric construction so s[-k] == -s[k] and w[-k] == w[k] bitwise.
    const double x = static_cast<double>(std::abs(k)) / M;
    const double r = kernel.rho(x);
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error("kernel '" + kernel.name + "' must be finite and >= 0");
    q.s[k + M] = (k < 0 ? -1.0 : 1.0) * std::abs(k) * T / M;
    q.w[k + M] = r;
  }
  for (int k = -M; k <= M; ++k) total += q.w[k + M];
  if (!(total > 0.0)) throw Error("kernel '" + kernel.name + "' vanishes on every node");
  for (auto& w : q.w) w /= total;
  return q;
}

/// Default half-count: T = 0 gives 0, otherwise max(4, ceil(T lambda_max / pi)),
/// about two nodes per half-period of the fastest wave.
inline int default_node_count(double T, double lambda_max) {
  if (T == 0.0) return 0;
  return std::max(4, static_cast<int>(std::ceil(T * lambda_max / std::numbers::pi)));
}

/// Phase-averaged nonlinearity  sum_k w_k e^{-L s_k} N(e^{L s_k} U).
///
/// Node terms are computed independently (in parallel when a pool is given)
/// and reduced in ascending k on the caller, so the result does not depend on
/// the number of workers.
inline State averaged_tendency(const State& state, const Quadrature& quad, const SpectralGrid& grid,
                               const PhysicsParams& params, const Propagator& prop,
                               WorkerPool* pool = nullptr) {
  const std::size_t n = quad.nodes();
  std::vector<std::optional<State>> terms(n);
  parallel_for(pool, n, [&](std::size_t k) {
    if (quad.w[k] == 0.0) return;
    try {
      const double s = quad.s[k];
      State shifted = prop.apply(s, state);
      State term = prop.apply(-s, apply_nonlinear(grid, params, shifted));
      terms[k] = std::move(term);
    } catch (const Error& e) {
      throw Error("averaging node k = " + std::to_string(static_cast<int>(k) - quad.M) + ": " + e.what());
    }
  });
  State out = State::zeros(grid, state.t);
  for (std::size_t k = 0; k < n; ++k)
    if (terms[k]) out.axpy(quad.w[k], *terms[k]);
  return out;
}

}  // namespace pasw
