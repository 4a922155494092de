#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pasw/config.hpp"
#include "pasw/integrator.hpp"

namespace pasw {

namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Physical-space field file: raw float64 little-endian, row-major with
/// index i*ny + j (i along x), plus a "<name>.txt" key = value sidecar.
inline void write_field(const fs::path& bin_path, const SpectralGrid& grid, const Field2D& field,
                        const std::string& name, double t) {
  const auto data = grid.to_physical(field);
  std::vector<char> bytes(data.size() * 8);
  for (std::size_t n = 0; n < data.size(); ++n) {
    auto bits = std::bit_cast<std::uint64_t>(data[n]);
    for (int b = 0; b < 8; ++b) bytes[n * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  {
    std::ofstream out(bin_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + bin_path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  auto meta_path = bin_path;
  meta_path.replace_extension(".txt");
  write_text(meta_path, "field = " + name + "\nnx = " + std::to_string(grid.nx()) + "\nny = " +
                            std::to_string(grid.ny()) + "\nLx = " + detail::fmt_double(grid.lx()) +
                            "\nLy = " + detail::fmt_double(grid.ly()) + "\nt = " + detail::fmt_double(t) +
                            "\nbyte_order = little\ndtype = float64\nlayout = row-major, index i*ny + j, i along x\n");
}

struct FieldFile {
  std::map<std::string, std::string> meta;
  std::vector<double> data;
};

inline FieldFile read_field(const fs::path& bin_path) {
  FieldFile ff;
  auto meta_path = bin_path;
  meta_path.replace_extension(".txt");
  std::istringstream meta(read_text(meta_path));
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    ff.meta[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  const std::string raw = read_text(bin_path);
  if (raw.size() % 8 != 0) throw Error("'" + bin_path.string() + "' is not a float64 array");
  ff.data.resize(raw.size() / 8);
  for (std::size_t n = 0; n < ff.data.size(); ++n) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[n * 8 + b])) << (8 * b);
    ff.data[n] = std::bit_cast<double>(bits);
  }
  return ff;
}

/// Writes <prefix>_u.bin, <prefix>_v.bin, <prefix>_eta.bin (+ sidecars).
inline void write_state(const fs::path& dir, const std::string& prefix, const SpectralGrid& grid, const State& s) {
  write_field(dir / (prefix + "_u.bin"), grid, s.u, "u", s.t);
  write_field(dir / (prefix + "_v.bin"), grid, s.v, "v", s.t);
  write_field(dir / (prefix + "_eta.bin"), grid, s.eta, "eta", s.t);
}

inline State read_state(const fs::path& dir, const std::string& prefix, const SpectralGrid& grid) {
  State s;
  for (auto [name, field] : {std::pair{"u", &s.u}, std::pair{"v", &s.v}, std::pair{"eta", &s.eta}}) {
    const auto ff = read_field(dir / (prefix + "_" + name + ".bin"));
    if (ff.meta.at("nx") != std::to_string(grid.nx()) || ff.meta.at("ny") != std::to_string(grid.ny()) ||
        ff.data.size() != grid.points())
      throw Error("'" + (dir / prefix).string() + "' was written on a different grid");
    *field = grid.to_spectral(ff.data);
    s.t = detail::parse_double(ff.meta.at("t"));
  }
  return s;
}

inline std::string csv_number(double x) { return detail::fmt_double(x); }

inline std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::string out = "t_seconds,energy,mass,max_speed,energy_drift,mass_drift\n";
  if (rows.empty()) return out;
  for (const auto& r : rows) {
    out += csv_number(r.t) + "," + csv_number(r.energy) + "," + csv_number(r.mass) + "," + csv_number(r.max_speed) +
           "," + csv_number(relative_drift(r.energy, rows.front().energy)) + "," +
           csv_number(relative_drift(r.mass, rows.front().mass)) + "\n";
  }
  return out;
}

inline std::string error_report_csv(const ErrorReport& r) {
  return "l2_eta,l2_u,linf_eta,energy_drift,mass_drift\n" + csv_number(r.l2_eta) + "," + csv_number(r.l2_u) + "," +
         csv_number(r.linf_eta) + "," + csv_number(r.energy_drift) + "," + csv_number(r.mass_drift) + "\n";
}

}  // namespace pasw
