#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "els/config.hpp"
#include "els/io.hpp"
#include "els/presets.hpp"

using namespace els;
namespace fs = std::filesystem;

namespace {

// Message of the raised error; fails the test when nothing is thrown.
std::string error_of(auto&& f, ErrorCode expected) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("els_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# a comment\n"
      "grid.n = 32\n"
      "material.gamma = 0.25   # trailing\n"
      "\n"
      "material.h_squared = 9\n"
      "winding.a1 = -2\n"
      "mode.integrator = bdf2\n"
      "initial.preset = taylor_green\n");
  CHECK(c.n == 32);
  CHECK(c.gamma == 0.25);
  CHECK(c.h_field == doctest::Approx(3.0));
  CHECK(c.winding == Winding{-2, 0});
  CHECK(c.mode.integrator == Integrator::bdf2);
  CHECK(c.initial.preset == "taylor_green");
  CHECK(c.reynolds == 1.0);

  const auto r = parse_config("material.h_squared_over_lambda2 = 0.5\n");
  CHECK(r.h_field * r.h_field == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));

  auto msg = error_of([] { parse_config("grid.n = 32\nbogus.key = 1\n", "cfg"); }, ErrorCode::ParseError);
  CHECK(msg.find("cfg:2") != std::string::npos);
  CHECK(msg.find("unknown key") != std::string::npos);

  msg = error_of([] { parse_config("grid.n = 32\n\ngrid.n = 64\n", "cfg"); }, ErrorCode::ParseError);
  CHECK(msg.find("cfg:3") != std::string::npos);
  CHECK(msg.find("duplicate") != std::string::npos);

  msg = error_of([] { parse_config("material.gamma = half\n", "cfg"); }, ErrorCode::ParseError);
  CHECK(msg.find("cfg:1") != std::string::npos);
  error_of([] { parse_config("grid.n = 32x\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("no equals sign\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("mode.integrator = rk4\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("grid.n = 17\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("time.dt = 0\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("material.h_squared = -1\n"); }, ErrorCode::ParseError);
  error_of([] { parse_config("initial.preset = snapshot\n"); }, ErrorCode::ParseError);
  error_of([] { load_config("/nonexistent/els.cfg"); }, ErrorCode::IoError);
}

TEST_CASE("config serialization and hash") {
  RunConfig c;
  c.n = 48;
  c.alpha = {0.1, -0.7, 0.2, 1.3, 0.5, 0.0};
  c.gamma = 1.0 / 3.0;
  c.h_field = std::sqrt(2.0);
  c.winding = {1, -1};
  c.initial.seed = 123456789012345ull;
  c.mode.coupling_off = true;
  c.steady.method = "gradient_flow";
  const std::string text = serialize_config(c);
  const RunConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.gamma == c.gamma);
  CHECK(back.h_field == c.h_field);
  CHECK(back.initial.seed == c.initial.seed);

  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(back) == h);
  RunConfig elsewhere = c;
  elsewhere.output_dir = "/somewhere/else";
  CHECK(config_hash(elsewhere) == h);
  RunConfig other = c;
  other.dt *= 2.0;
  CHECK(config_hash(other) != h);

  // Independent FNV-1a of the canonical text with an empty output dir.
  RunConfig keyed = c;
  keyed.output_dir.clear();
  std::uint64_t ref = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize_config(keyed)) ref = (ref ^ ch) * 0x100000001b3ull;
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << ref;
  CHECK(h == hex.str());
}

TEST_CASE("admissibility report") {
  RunConfig c;
  auto rep = validate_config(c);
  CHECK(rep.ok);
  CHECK(rep.beta1 == doctest::Approx(1.0));
  CHECK(rep.beta2 == doctest::Approx(1.0));
  CHECK(std::abs(rep.beta3) < 1e-15);
  for (const auto& chk : rep.checks) CHECK(chk.pass);

  c.alpha[5] = 0.5;  // breaks Parodi only
  rep = validate_config(c);
  CHECK_FALSE(rep.ok);
  int failed = 0;
  for (const auto& chk : rep.checks)
    if (!chk.pass) {
      ++failed;
      CHECK(chk.name == "parodi");
    }
  CHECK(failed == 1);

  RunConfig g;
  g.gamma = 1.5;
  CHECK_FALSE(validate_config(g).ok);
  error_of([&] { material_of(g); }, ErrorCode::RangeError);
}

TEST_CASE("snapshot round trip") {
  TempDir dir;
  const Grid g(16);
  std::mt19937_64 rng(5);
  const SimState s{solenoidal_noise(g, rng, 0.7), AngleField(band_limited_noise(g, rng, 1.1), {2, -1}), 0.375};
  const std::string path = (dir.path / "state.bin").string();
  write_snapshot(path, snapshot_of(s));
  CHECK(fs::file_size(path) == 4 + 4 + 4 + 4 + 4 + 8 + 3 * 16 * 16 * 8);

  const SimState r = state_of(read_snapshot(path));
  CHECK(r.t == s.t);
  CHECK(r.theta.winding() == Winding{2, -1});
  CHECK(std::memcmp(r.v.u1.values().data(), s.v.u1.values().data(), 256 * sizeof(double)) == 0);
  CHECK(std::memcmp(r.v.u2.values().data(), s.v.u2.values().data(), 256 * sizeof(double)) == 0);
  CHECK(std::memcmp(r.theta.remainder().values().data(), s.theta.remainder().values().data(), 256 * sizeof(double)) ==
        0);

  // Header bytes are little endian.
  std::ifstream in(path, std::ios::binary);
  unsigned char head[12];
  in.read(reinterpret_cast<char*>(head), 12);
  CHECK(std::memcmp(head, "ELS1", 4) == 0);
  CHECK(head[4] == 16);
  CHECK(head[8] == 3);

  write_sidecar(path, "0123456789abcdef", {"v1", "v2", "theta"}, s.t);
  std::ifstream side(path + ".json");
  const auto j = nlohmann::json::parse(side);
  CHECK(j["config_hash"] == "0123456789abcdef");
  CHECK(j["components"].size() == 3);

  const std::string bad = (dir.path / "bad.bin").string();
  std::ofstream(bad, std::ios::binary) << "NOPE and some bytes";
  error_of([&] { read_snapshot(bad); }, ErrorCode::ParseError);

  const std::string cut = (dir.path / "cut.bin").string();
  fs::copy_file(path, cut);
  fs::resize_file(cut, fs::file_size(path) - 8);
  error_of([&] { read_snapshot(cut); }, ErrorCode::IoError);

  const std::string longer = (dir.path / "long.bin").string();
  fs::copy_file(path, longer);
  std::ofstream(longer, std::ios::binary | std::ios::app) << 'x';
  error_of([&] { read_snapshot(longer); }, ErrorCode::ParseError);

  error_of([&] { read_snapshot((dir.path / "missing.bin").string()); }, ErrorCode::IoError);
}

TEST_CASE("diagnostics csv") {
  std::vector<DiagnosticsRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k].t = 0.1 * k;
    recs[k].energy_E = 1.0 / 3.0 + k;
    recs[k].dissipation_D = std::exp(-k);
    recs[k].energy_EH = 1e-300 * (k + 1);
    recs[k].v_l2 = kPi;
    recs[k].v_h1 = -0.0;
    recs[k].theta_residual = 2.5e-17;
  }
  recs[1].dist_h2 = 0.123456789012345678;

  std::stringstream io;
  write_diagnostics_csv(io, recs);
  const auto back = read_diagnostics_csv(io);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].t == recs[k].t);
    CHECK(back[k].energy_E == recs[k].energy_E);
    CHECK(back[k].dissipation_D == recs[k].dissipation_D);
    CHECK(back[k].energy_EH == recs[k].energy_EH);
    CHECK(back[k].theta_residual == recs[k].theta_residual);
    CHECK(back[k].dist_h2.has_value() == (k == 1));
  }
  CHECK(*back[1].dist_h2 == *recs[1].dist_h2);
  CHECK(csv_row(recs[0]).back() == ',');

  std::istringstream bad_row(std::string(kCsvHeader) + "\n" + csv_row(recs[0]) + "\n1,2,3\n");
  auto msg = error_of([&] { read_diagnostics_csv(bad_row); }, ErrorCode::ParseError);
  CHECK(msg.find("row 3") != std::string::npos);

  std::istringstream bad_cell(std::string(kCsvHeader) + "\n0,1,2,3,x,5,6,\n");
  msg = error_of([&] { read_diagnostics_csv(bad_cell); }, ErrorCode::ParseError);
  CHECK(msg.find("row 2") != std::string::npos);

  std::istringstream bad_header("t,E\n");
  error_of([&] { read_diagnostics_csv(bad_header); }, ErrorCode::ParseError);
}

TEST_CASE("output directory guard") {
  TempDir dir;
  const std::string out = (dir.path / "run").string();
  prepare_output_dir(out, "aaaaaaaaaaaaaaaa");
  CHECK(fs::exists(fs::path(out) / "config.hash"));
  prepare_output_dir(out, "aaaaaaaaaaaaaaaa");  // same config: allowed
  const auto msg = error_of([&] { prepare_output_dir(out, "bbbbbbbbbbbbbbbb"); }, ErrorCode::IoError);
  CHECK(msg.find("refusing") != std::string::npos);
}
