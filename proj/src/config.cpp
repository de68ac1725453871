#include "els/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace els {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Location {
  std::string_view source;
  int line;
  std::string_view key;
};

[[noreturn]] void fail(const Location& at, const std::string& what) {
  std::ostringstream msg;
  msg << at.source << ":" << at.line << ": " << at.key << ": " << what;
  throw Error(ErrorCode::ParseError, msg.str());
}

double to_double(std::string_view v, const Location& at) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    fail(at, "expected a finite number, got '" + std::string(v) + "'");
  return x;
}

template <class Int>
Int to_int(std::string_view v, const Location& at) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail(at, "expected an integer, got '" + std::string(v) + "'");
  return x;
}

bool to_bool(std::string_view v, const Location& at) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(at, "expected true or false, got '" + std::string(v) + "'");
}

std::string one_of(std::string_view v, std::initializer_list<std::string_view> allowed, const Location& at) {
  for (auto a : allowed)
    if (v == a) return std::string(v);
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  fail(at, "expected one of {" + list + "}, got '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view, const Location&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["grid.n"] = [](RunConfig& c, std::string_view v, const Location& at) { c.n = to_int<int>(v, at); };
    for (int k = 1; k <= 6; ++k)
      t["material.alpha" + std::to_string(k)] = [k](RunConfig& c, std::string_view v, const Location& at) {
        c.alpha[k - 1] = to_double(v, at);
      };
    t["material.gamma"] = [](RunConfig& c, std::string_view v, const Location& at) { c.gamma = to_double(v, at); };
    t["material.reynolds"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.reynolds = to_double(v, at);
    };
    t["material.h_field"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.h_field = to_double(v, at);
    };
    t["material.h_squared"] = [](RunConfig& c, std::string_view v, const Location& at) {
      const double h2 = to_double(v, at);
      if (h2 < 0.0) fail(at, "must be >= 0");
      c.h_field = std::sqrt(h2);
    };
    t["material.h_squared_over_lambda2"] = [](RunConfig& c, std::string_view v, const Location& at) {
      const double r = to_double(v, at);
      if (r < 0.0) fail(at, "must be >= 0");
      c.h_field = std::sqrt(r * 4.0 * kPi * kPi);
    };
    t["winding.a1"] = [](RunConfig& c, std::string_view v, const Location& at) { c.winding.a1 = to_int<int>(v, at); };
    t["winding.a2"] = [](RunConfig& c, std::string_view v, const Location& at) { c.winding.a2 = to_int<int>(v, at); };
    t["initial.preset"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.initial.preset = one_of(v, {"steady_plus_noise", "taylor_green", "aligned", "winding_linear", "snapshot"}, at);
    };
    t["initial.snapshot"] = [](RunConfig& c, std::string_view v, const Location&) { c.initial.snapshot = v; };
    t["initial.seed"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.initial.seed = to_int<std::uint64_t>(v, at);
    };
    t["initial.amplitude"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.initial.amplitude = to_double(v, at);
    };
    t["initial.velocity_amplitude"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.initial.velocity_amplitude = to_double(v, at);
    };
    t["time.dt"] = [](RunConfig& c, std::string_view v, const Location& at) { c.dt = to_double(v, at); };
    t["time.t_end"] = [](RunConfig& c, std::string_view v, const Location& at) { c.t_end = to_double(v, at); };
    t["time.sample_every"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.sample_every = to_int<int>(v, at);
    };
    t["output.dir"] = [](RunConfig& c, std::string_view v, const Location&) { c.output_dir = v; };
    t["output.snapshot_every"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.snapshot_every = to_int<int>(v, at);
    };
    t["output.reference"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.reference = one_of(v, {"none", "steady"}, at);
    };
    t["mode.coupling_off"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.mode.coupling_off = to_bool(v, at);
    };
    t["mode.integrator"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.mode.integrator = one_of(v, {"euler", "bdf2"}, at) == "euler" ? Integrator::euler : Integrator::bdf2;
    };
    t["steady.method"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.steady.method = one_of(v, {"newton", "gradient_flow"}, at);
    };
    t["steady.init"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.steady.init = one_of(v, {"cos", "random", "constant"}, at);
    };
    t["steady.amplitude"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.steady.amplitude = to_double(v, at);
    };
    t["steady.tol"] = [](RunConfig& c, std::string_view v, const Location& at) { c.steady.tol = to_double(v, at); };
    t["steady.max_time"] = [](RunConfig& c, std::string_view v, const Location& at) {
      c.steady.max_time = to_double(v, at);
    };
    t["steady.tau"] = [](RunConfig& c, std::string_view v, const Location& at) { c.steady.tau = to_double(v, at); };
    return t;
  }();
  return table;
}

void check_structure(const RunConfig& c, std::string_view source) {
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, std::string(source) + ": " + what);
  };
  if (c.n < 16 || c.n % 2 != 0) bad("grid.n must be even and >= 16");
  if (!(c.dt > 0.0)) bad("time.dt must be > 0");
  if (!(c.t_end > 0.0)) bad("time.t_end must be > 0");
  if (c.sample_every < 1) bad("time.sample_every must be >= 1");
  if (c.snapshot_every < 0) bad("output.snapshot_every must be >= 0");
  if (c.initial.preset == "snapshot" && c.initial.snapshot.empty()) bad("initial.snapshot required for preset snapshot");
  if (!(c.steady.tol > 0.0)) bad("steady.tol must be > 0");
  if (!(c.steady.max_time > 0.0)) bad("steady.max_time must be > 0");
  if (!(c.steady.tau > 0.0)) bad("steady.tau must be > 0");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail({source, line_no, line}, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const Location at{source, line_no, key};
    const auto it = setters().find(key);
    if (it == setters().end()) fail(at, "unknown key");
    if (!seen.insert(std::string(key)).second) fail(at, "duplicate key");
    if (value.empty()) fail(at, "missing value");
    it->second(c, value, at);
  }
  check_structure(c, source);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "grid.n = " << c.n << "\n";
  for (int k = 0; k < 6; ++k) o << "material.alpha" << k + 1 << " = " << num(c.alpha[k]) << "\n";
  o << "material.gamma = " << num(c.gamma) << "\n";
  o << "material.reynolds = " << num(c.reynolds) << "\n";
  o << "material.h_field = " << num(c.h_field) << "\n";
  o << "winding.a1 = " << c.winding.a1 << "\n";
  o << "winding.a2 = " << c.winding.a2 << "\n";
  o << "initial.preset = " << c.initial.preset << "\n";
  if (!c.initial.snapshot.empty()) o << "initial.snapshot = " << c.initial.snapshot << "\n";
  o << "initial.seed = " << c.initial.seed << "\n";
  o << "initial.amplitude = " << num(c.initial.amplitude) << "\n";
  o << "initial.velocity_amplitude = " << num(c.initial.velocity_amplitude) << "\n";
  o << "time.dt = " << num(c.dt) << "\n";
  o << "time.t_end = " << num(c.t_end) << "\n";
  o << "time.sample_every = " << c.sample_every << "\n";
  o << "output.dir = " << c.output_dir << "\n";
  o << "output.snapshot_every = " << c.snapshot_every << "\n";
  o << "output.reference = " << c.reference << "\n";
  o << "mode.coupling_off = " << (c.mode.coupling_off ? "true" : "false") << "\n";
  o << "mode.integrator = " << (c.mode.integrator == Integrator::euler ? "euler" : "bdf2") << "\n";
  o << "steady.method = " << c.steady.method << "\n";
  o << "steady.init = " << c.steady.init << "\n";
  o << "steady.amplitude = " << num(c.steady.amplitude) << "\n";
  o << "steady.tol = " << num(c.steady.tol) << "\n";
  o << "steady.max_time = " << num(c.steady.max_time) << "\n";
  o << "steady.tau = " << num(c.steady.tau) << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& c) {
  RunConfig key = c;
  key.output_dir.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(key)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ValidationReport validate_config(const RunConfig& c) {
  ValidationReport r;
  auto add = [&](std::string name, bool pass, std::string detail) {
    r.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  const auto& a = c.alpha;
  bool finite = true;
  for (double x : a) finite = finite && std::isfinite(x);
  add("range", finite && c.gamma > 0.0 && c.gamma < 1.0 && c.reynolds > 0.0 && c.h_field >= 0.0,
      "gamma in (0,1) [" + num(c.gamma) + "], Re > 0 [" + num(c.reynolds) + "], H >= 0 [" + num(c.h_field) + "]");
  const double parodi = (a[1] + a[2]) - (a[5] - a[4]);
  add("parodi", std::abs(parodi) < kRelationTolerance,
      "alpha2+alpha3 = " + num(a[1] + a[2]) + ", alpha6-alpha5 = " + num(a[5] - a[4]));
  r.gamma1 = a[2] - a[1];
  r.gamma2 = a[4] - a[5];
  add("gamma1_positive", r.gamma1 > 0.0, "gamma1 = alpha3-alpha2 = " + num(r.gamma1));
  if (r.gamma1 != 0.0) {
    r.mu1 = 1.0 / r.gamma1;
    r.mu2 = r.gamma2 / r.gamma1;
    r.beta1 = a[0] + r.gamma2 * r.gamma2 / r.gamma1;
    r.beta2 = a[3];
    r.beta3 = a[4] + a[5] - r.gamma2 * r.gamma2 / r.gamma1;
    const double s1 = r.beta1 + 2.0 * r.beta2 + r.beta3;
    const double s2 = 2.0 * r.beta2 + r.beta3;
    add("beta1+2beta2+beta3>=0", s1 >= 0.0, num(s1));
    add("2beta2+beta3>=0", s2 >= 0.0, num(s2));
  } else {
    add("beta1+2beta2+beta3>=0", false, "undefined for gamma1 = 0");
    add("2beta2+beta3>=0", false, "undefined for gamma1 = 0");
  }
  r.ok = true;
  for (const auto& ch : r.checks) r.ok = r.ok && ch.pass;
  return r;
}

MaterialParams material_of(const RunConfig& c) { return derive_params(c.alpha, c.gamma, c.reynolds, c.h_field); }

}  // namespace els
