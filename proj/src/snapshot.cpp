#include "els/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace els {
namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t k = 0; k < sizeof(T); ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in, const std::string& path) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw Error(ErrorCode::IoError, "truncated snapshot " + path);
  U bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<U>(bytes[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const std::size_t nn = static_cast<std::size_t>(snap.n) * snap.n;
  for (const auto& c : snap.components)
    if (c.size() != nn) throw Error(ErrorCode::InvalidArgument, "snapshot component has the wrong size");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write("ELS1", 4);
  put_le(out, snap.n);
  put_le(out, static_cast<std::uint32_t>(snap.components.size()));
  put_le(out, snap.a1);
  put_le(out, snap.a2);
  put_le(out, snap.t);
  for (const auto& c : snap.components)
    for (double x : c) put_le(out, x);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "ELS1", 4) != 0)
    throw Error(ErrorCode::ParseError, path + " is not an ELS1 snapshot");
  Snapshot s;
  s.n = get_le<std::uint32_t>(in, path);
  const auto count = get_le<std::uint32_t>(in, path);
  s.a1 = get_le<std::int32_t>(in, path);
  s.a2 = get_le<std::int32_t>(in, path);
  s.t = get_le<double>(in, path);
  if (s.n < 16 || s.n % 2 != 0 || s.n > 65536 || count > 64)
    throw Error(ErrorCode::ParseError, path + ": implausible header");
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  s.components.assign(count, std::vector<double>(nn));
  for (auto& c : s.components)
    for (double& x : c) x = get_le<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::ParseError, path + ": trailing bytes");
  return s;
}

Snapshot snapshot_of(const SimState& s) {
  auto copy = [](const ScalarField& f) { return std::vector<double>(f.values().begin(), f.values().end()); };
  Snapshot out;
  out.n = static_cast<std::uint32_t>(s.grid().n());
  out.a1 = s.theta.winding().a1;
  out.a2 = s.theta.winding().a2;
  out.t = s.t;
  out.components = {copy(s.v.u1), copy(s.v.u2), copy(s.theta.remainder())};
  return out;
}

SimState state_of(const Snapshot& snap) {
  if (snap.components.size() != 3) throw Error(ErrorCode::ParseError, "state snapshots carry 3 components");
  const Grid g(static_cast<int>(snap.n));
  return SimState{VectorField2(ScalarField(g, snap.components[0]), ScalarField(g, snap.components[1])),
                  AngleField(ScalarField(g, snap.components[2]), Winding{snap.a1, snap.a2}), snap.t};
}

void write_sidecar(const std::string& snapshot_path, const std::string& config_hash,
                   const std::vector<std::string>& component_names, double t) {
  nlohmann::ordered_json j;
  j["format"] = "ELS1";
  j["config_hash"] = config_hash;
  j["time"] = t;
  j["components"] = component_names;
  std::ofstream out(snapshot_path + ".json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write sidecar for " + snapshot_path);
  out << j.dump(2) << "\n";
}

std::string csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", r.t, r.energy_E,
                          r.dissipation_D, r.energy_EH, r.v_l2, r.v_h1, r.theta_residual);
  std::string row(buf, static_cast<std::size_t>(len));
  if (r.dist_h2) {
    len = std::snprintf(buf, sizeof buf, "%.17g", *r.dist_h2);
    row.append(buf, static_cast<std::size_t>(len));
  }
  return row;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  out << kCsvHeader << "\n";
  for (const auto& r : records) out << csv_row(r) << "\n";
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "CSV row " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) fail("missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) fail("unexpected header '" + line + "'");

  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (cells.size() != 8) fail("expected 8 columns, found " + std::to_string(cells.size()));
    double v[8] = {};
    for (std::size_t k = 0; k < 8; ++k) {
      if (k == 7 && cells[k].empty()) continue;
      const auto [ptr, ec] = std::from_chars(cells[k].data(), cells[k].data() + cells[k].size(), v[k]);
      if (ec != std::errc() || ptr != cells[k].data() + cells[k].size())
        fail("column " + std::to_string(k + 1) + " is not a number: '" + std::string(cells[k]) + "'");
    }
    DiagnosticsRecord r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], std::nullopt};
    if (!cells[7].empty()) r.dist_h2 = v[7];
    out.push_back(r);
  }
  return out;
}

void prepare_output_dir(const std::string& dir, const std::string& config_hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  const fs::path stamp = fs::path(dir) / "config.hash";
  if (fs::exists(stamp)) {
    std::ifstream in(stamp);
    std::string existing;
    in >> existing;
    if (existing != config_hash)
      throw Error(ErrorCode::IoError,
                  "refusing to overwrite " + dir + ": it holds outputs of config " + existing + ", not " + config_hash);
    return;
  }
  std::ofstream out(stamp, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + stamp.string());
  out << config_hash << "\n";
}

}  // namespace els
