#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "pasw/config.hpp"
#include "pasw/io.hpp"
#include "pasw/oracles.hpp"

using namespace pasw;
namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pasw-unit-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  EXPECT_EQ(parse_config(""), RunConfig{});
  EXPECT_EQ(parse_config("# only a comment\n\n   \n"), RunConfig{});
}

TEST(Config, DefaultsMatchTheExperiment) {
  const RunConfig c;
  EXPECT_EQ(c.dt, 3600.0);
  EXPECT_EQ(c.dt_reference, 180.0);
  EXPECT_EQ(c.t_end, 15 * 86400.0);
  EXPECT_EQ(c.u0, 20.0);
  EXPECT_EQ(c.H, 5960.0);
  EXPECT_EQ(c.g, 9.8);
  EXPECT_EQ(c.b0, 2000.0);
  EXPECT_EQ(c.nx, 64);
  EXPECT_FALSE(c.M.has_value());
}

TEST(Config, ParsesValues) {
  const RunConfig c = parse_config(
      "dt = 3600\n"
      "nx=32   # trailing comment\n"
      "  M = 6\n"
      "propagator = chebyshev\n"
      "kernel = constant\n"
      "output_dir = results/a b\n"
      "t_end = 7200\n");
  EXPECT_EQ(c.dt, 3600.0);
  EXPECT_EQ(c.nx, 32);
  EXPECT_EQ(c.M, 6);
  EXPECT_EQ(c.propagator, PropagatorKind::chebyshev);
  EXPECT_EQ(c.kernel, "constant");
  EXPECT_EQ(c.output_dir, "results/a b");
  EXPECT_EQ(parse_config("M = auto").M, std::nullopt);
}

TEST(Config, ErrorsCiteLines) {
  EXPECT_NE(config_error("nx = 64\ndt = -5\n").find("line 2: dt: must be positive"), std::string::npos);
  EXPECT_NE(config_error("\n\nbogus = 1\n").find("line 3: unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(config_error("dt = 1\ndt = 2\n").find("line 2: duplicate key 'dt'"), std::string::npos);
  EXPECT_NE(config_error("dt = fast\n").find("line 1: dt: not a number"), std::string::npos);
  EXPECT_NE(config_error("just words\n").find("line 1: expected 'key = value'"), std::string::npos);
  EXPECT_NE(config_error("nx = 7\n").find("line 1: nx"), std::string::npos);
  EXPECT_NE(config_error("dt = inf\n").find("line 1: dt"), std::string::npos);
  EXPECT_NE(config_error("propagator = krylov\n").find("line 1"), std::string::npos);
  // Invariants involving defaults point at the offending key's source.
  EXPECT_NE(config_error("dt = 7000\n").find("default: t_end: must be a multiple of dt"), std::string::npos);
  EXPECT_NE(config_error("T = 0\nM = 3\n").find("line 2: M"), std::string::npos);
}

TEST(Config, ResolvedTextRoundTrips) {
  RunConfig c = parse_config("nx = 32\nT = 1800\ng = 9.81\nxc = 1.2345678901234567e7\nreference = ref dir\n");
  const std::string text = resolved_text(c, 7);
  EXPECT_NE(text.find("M = auto  # resolves to 7"), std::string::npos);
  EXPECT_NE(text.find("g = 9.81\n"), std::string::npos);
  EXPECT_EQ(parse_config(text), c);
  c.M = 5;
  EXPECT_EQ(parse_config(resolved_text(c)), c);
  EXPECT_EQ(parse_config(resolved_text(RunConfig{})), RunConfig{});
}

TEST(Config, LoadFromFile) {
  const fs::path d = temp_dir("config");
  write_text(d / "a.cfg", "dt = 1800\n");
  EXPECT_EQ(load_config((d / "a.cfg").string()).dt, 1800.0);
  EXPECT_THROW(load_config((d / "missing.cfg").string()), ConfigError);
  write_text(d / "bad.cfg", "dt = 0\n");
  try {
    (void)load_config((d / "bad.cfg").string());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cfg: line 1"), std::string::npos);
  }
}

TEST(FieldFiles, RoundTripBitwise) {
  const SpectralGrid g(16, 8, 1e6, 2e6);
  std::mt19937_64 rng(71);
  State s = oracle::random_state(g, rng);
  s.t = 86400.0;
  const fs::path d = temp_dir("fields");
  write_state(d, "snap", g, s);
  const auto phys = g.to_physical(s.eta);
  const auto ff = read_field(d / "snap_eta.bin");
  EXPECT_EQ(ff.data, phys);
  EXPECT_EQ(fs::file_size(d / "snap_eta.bin"), g.points() * 8);
  EXPECT_EQ(ff.meta.at("field"), "eta");
  EXPECT_EQ(ff.meta.at("nx"), "16");
  EXPECT_EQ(ff.meta.at("byte_order"), "little");
  EXPECT_EQ(ff.meta.at("t"), "86400");
  const State back = read_state(d, "snap", g);
  EXPECT_EQ(back.t, s.t);
  const auto bu = g.to_physical(back.u), su = g.to_physical(s.u);
  for (std::size_t n = 0; n < su.size(); ++n) EXPECT_NEAR(bu[n], su[n], 1e-13 * 10.0);
  EXPECT_THROW(read_state(d, "snap", SpectralGrid(8, 8, 1e6, 1e6)), Error);
}

TEST(FieldFiles, LittleEndianLayout) {
  const SpectralGrid g(8, 8, 1.0, 1.0);
  std::vector<double> x(g.points(), 0.0);
  x[1] = 1.0;  // i = 0, j = 1
  const fs::path d = temp_dir("layout");
  write_field(d / "f.bin", g, g.to_spectral(x), "f", 0.0);
  const std::string raw = read_text(d / "f.bin");
  // 1.0 = 0x3ff0000000000000, low byte first.
  EXPECT_EQ(static_cast<unsigned char>(raw[8 + 7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(raw[8 + 6]), 0xf0);
  EXPECT_EQ(static_cast<unsigned char>(raw[8]), 0x00);
}

TEST(Csv, DiagnosticsAndErrorReport) {
  const std::vector<DiagnosticsRow> rows{{0.0, 2.0, 10.0, 1.0}, {3600.0, 2.5, 10.0, 1.5}};
  EXPECT_EQ(diagnostics_csv(rows),
            "t_seconds,energy,mass,max_speed,energy_drift,mass_drift\n"
            "0,2,10,1,0,0\n"
            "3600,2.5,10,1.5,0.25,0\n");
  EXPECT_EQ(error_report_csv(ErrorReport{0.5, 0.25, 3.0, 1e-6, 0.0}),
            "l2_eta,l2_u,linf_eta,energy_drift,mass_drift\n0.5,0.25,3,1e-06,0\n");
}
