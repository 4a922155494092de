#pragma once

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pasw/propagator.hpp"
#include "pasw/spectral_grid.hpp"

namespace pasw {

/// Raised for unreadable, malformed or invalid configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything a run, reference, or sweep needs. Defaults reproduce the
/// planar flow-over-mountain experiment: 64^2 grid on a 40 000 km square,
/// dt = 1 h averaged, 180 s reference, 15 days.
struct RunConfig {
  // grid
  int nx = 64;
  int ny = 64;
  double Lx = 4.0e7;
  double Ly = 4.0e7;
  // physics
  double f = 1e-4;
  double g = 9.8;
  double H = 5960.0;
  // case
  double u0 = 20.0;
  double jet_width = 4.0e7 / 16;
  double b0 = 2000.0;
  double r0 = 4.0e7 / 9;
  double xc = 2.0e7;
  double yc = 1.0e7;
  // time stepping
  double dt = 3600.0;
  double dt_reference = 180.0;
  double T = 3600.0;
  std::optional<int> M;  // nullopt = auto
  std::string kernel = "bump";
  PropagatorKind propagator = PropagatorKind::exact;
  double cheb_tol = 1e-10;
  double t_end = 15 * 86400.0;
  double snapshot_every = 86400.0;
  // execution
  int workers = 1;
  std::string output_dir = "out";
  long seed = 12345;
  std::string reference;  // directory of a previous reference run; empty = none

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Shortest decimal text that parses back to exactly x.
inline std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& v) {
  if (v.empty()) throw std::invalid_argument("empty value");
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE) throw std::invalid_argument("not a number: '" + v + "'");
  if (!std::isfinite(x)) throw std::invalid_argument("not finite: '" + v + "'");
  return x;
}

inline long parse_long(const std::string& v) {
  if (v.empty()) throw std::invalid_argument("empty value");
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) throw std::invalid_argument("not an integer: '" + v + "'");
  return x;
}

inline int parse_int(const std::string& v) {
  const long x = parse_long(v);
  if (x < -2147483647L || x > 2147483647L) throw std::invalid_argument("integer out of range: '" + v + "'");
  return static_cast<int>(x);
}

struct KeySpec {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PASW_DOUBLE_KEY(field) \
  KeySpec { #field, [](RunConfig& c, const std::string& v) { c.field = parse_double(v); }, \
            [](const RunConfig& c) { return fmt_double(c.field); } }
#define PASW_INT_KEY(field) \
  KeySpec { #field, [](RunConfig& c, const std::string& v) { c.field = parse_int(v); }, \
            [](const RunConfig& c) { return std::to_string(c.field); } }

/// Key table in echo order.
inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> keys = {
      PASW_INT_KEY(nx),
      PASW_INT_KEY(ny),
      PASW_DOUBLE_KEY(Lx),
      PASW_DOUBLE_KEY(Ly),
      PASW_DOUBLE_KEY(f),
      PASW_DOUBLE_KEY(g),
      PASW_DOUBLE_KEY(H),
      PASW_DOUBLE_KEY(u0),
      PASW_DOUBLE_KEY(jet_width),
      PASW_DOUBLE_KEY(b0),
      PASW_DOUBLE_KEY(r0),
      PASW_DOUBLE_KEY(xc),
      PASW_DOUBLE_KEY(yc),
      PASW_DOUBLE_KEY(dt),
      PASW_DOUBLE_KEY(dt_reference),
      PASW_DOUBLE_KEY(T),
      KeySpec{"M",
              [](RunConfig& c, const std::string& v) {
                if (v == "auto")
                  c.M.reset();
                else
                  c.M = parse_int(v);
              },
              [](const RunConfig& c) { return c.M ? std::to_string(*c.M) : std::string("auto"); }},
      KeySpec{"kernel",
              [](RunConfig& c, const std::string& v) {
                if (v != "bump" && v != "constant") throw std::invalid_argument("expected bump or constant");
                c.kernel = v;
              },
              [](const RunConfig& c) { return c.kernel; }},
      KeySpec{"propagator",
              [](RunConfig& c, const std::string& v) {
                if (v == "exact")
                  c.propagator = PropagatorKind::exact;
                else if (v == "chebyshev")
                  c.propagator = PropagatorKind::chebyshev;
                else
                  throw std::invalid_argument("expected exact or chebyshev");
              },
              [](const RunConfig& c) { return to_string(c.propagator); }},
      PASW_DOUBLE_KEY(cheb_tol),
      PASW_DOUBLE_KEY(t_end),
      PASW_DOUBLE_KEY(snapshot_every),
      PASW_INT_KEY(workers),
      KeySpec{"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
              [](const RunConfig& c) { return c.output_dir; }},
      KeySpec{"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_long(v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
      KeySpec{"reference", [](RunConfig& c, const std::string& v) { c.reference = v; },
              [](const RunConfig& c) { return c.reference; }},
  };
  return keys;
}

#undef PASW_DOUBLE_KEY
#undef PASW_INT_KEY

}  // namespace detail

/// Checks every invariant; `where` maps a key to its "line N" (or "default").
inline void validate_config(const RunConfig& c, const std::function<std::string(const char*)>& where) {
  auto fail = [&](const char* key, const std::string& msg) {
    throw ConfigError(where(key) + ": " + key + ": " + msg);
  };
  if (c.nx < 8 || c.nx % 2 != 0) fail("nx", "must be even and >= 8");
  if (c.ny < 8 || c.ny % 2 != 0) fail("ny", "must be even and >= 8");
  if (!(c.Lx > 0)) fail("Lx", "must be positive");
  if (!(c.Ly > 0)) fail("Ly", "must be positive");
  if (!(c.g > 0)) fail("g", "must be positive");
  if (!(c.H > 0)) fail("H", "must be positive");
  if (!(c.jet_width > 0)) fail("jet_width", "must be positive");
  if (!(c.b0 > 0 && c.b0 < c.H)) fail("b0", "must satisfy 0 < b0 < H");
  if (!(c.r0 > 0 && c.r0 < 0.5 * std::min(c.Lx, c.Ly))) fail("r0", "must satisfy 0 < r0 < min(Lx, Ly)/2");
  if (!(c.dt > 0)) fail("dt", "must be positive");
  if (!(c.dt_reference > 0)) fail("dt_reference", "must be positive");
  if (!(c.T >= 0)) fail("T", "must be >= 0");
  if (c.M && *c.M < 0) fail("M", "must be >= 0 or auto");
  if (c.M && c.T == 0 && *c.M != 0) fail("M", "T = 0 requires M = 0");
  if (!(c.cheb_tol > 0)) fail("cheb_tol", "must be positive");
  if (!(c.t_end >= 0)) fail("t_end", "must be >= 0");
  auto multiple = [](double span, double dt) {
    const double r = span / dt;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
  };
  if (!multiple(c.t_end, c.dt)) fail("t_end", "must be a multiple of dt");
  if (!multiple(c.t_end, c.dt_reference)) fail("t_end", "must be a multiple of dt_reference");
  if (!(c.snapshot_every >= 0)) fail("snapshot_every", "must be >= 0");
  if (c.snapshot_every > 0 && !multiple(c.snapshot_every, c.dt)) fail("snapshot_every", "must be a multiple of dt");
  if (c.workers < 1) fail("workers", "must be >= 1");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
}

/// Parses the flat `key = value` format. '#' starts a comment; blank lines
/// are ignored; each key may appear once. Unset keys keep their defaults.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, int> line_of;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string here = "line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(here + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const auto& keys = detail::key_specs();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return key == k.name; });
    if (it == keys.end()) throw ConfigError(here + ": unknown key '" + key + "'");
    if (line_of.count(key)) throw ConfigError(here + ": duplicate key '" + key + "'");
    try {
      it->set(c, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(here + ": " + key + ": " + e.what());
    }
    line_of[key] = line_no;
  }
  validate_config(c, [&](const char* key) {
    auto it = line_of.find(key);
    return it == line_of.end() ? std::string("default") : "line " + std::to_string(it->second);
  });
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Every key with its resolved value, in load_config's format. When M is
/// auto the value it resolved to is noted in a trailing comment.
inline std::string resolved_text(const RunConfig& c, std::optional<int> resolved_M = {}) {
  std::string out = "# fully resolved configuration\n";
  for (const auto& k : detail::key_specs()) {
    out += std::string(k.name) + " = " + k.get(c);
    if (std::string(k.name) == "M" && !c.M && resolved_M) out += "  # resolves to " + std::to_string(*resolved_M);
    out += "\n";
  }
  return out;
}

}  // namespace pasw
