#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "els/dynamics.hpp"

namespace els {

/// Binary field dump: "ELS1", u32 n, u32 component count, i32 a1, i32 a2,
/// f64 time, then the components as row-major f64, all little endian.
struct Snapshot {
  std::uint32_t n = 0;
  std::int32_t a1 = 0;
  std::int32_t a2 = 0;
  double t = 0.0;
  std::vector<std::vector<double>> components;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Components (v1, v2, theta remainder); the winding is theta's.
Snapshot snapshot_of(const SimState& s);
SimState state_of(const Snapshot& snap);

/// Writes `path`.json next to a snapshot with the config hash and layout.
void write_sidecar(const std::string& snapshot_path, const std::string& config_hash,
                   const std::vector<std::string>& component_names, double t);

inline constexpr const char* kCsvHeader = "t,energy_E,dissipation_D,energy_EH,v_l2,v_h1,theta_residual,dist_h2";

/// One line, %.17g for every value, empty dist_h2 when unset.
std::string csv_row(const DiagnosticsRecord& r);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Parses the diagnostics schema.  Malformed rows raise ParseError with
/// their 1-based line number.
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in);

/// Creates `dir` if needed and records the hash.  Refuses (IoError) when the
/// directory already holds outputs of a different configuration.
void prepare_output_dir(const std::string& dir, const std::string& config_hash);

}  // namespace els
