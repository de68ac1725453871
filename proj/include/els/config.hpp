#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "els/director.hpp"
#include "els/dynamics.hpp"
#include "els/material.hpp"

namespace els {

struct InitialSpec {
  std::string preset = "aligned";  // steady_plus_noise | taylor_green | aligned | winding_linear | snapshot
  std::string snapshot;            // path, used when preset = snapshot
  std::uint64_t seed = 0;
  double amplitude = 0.2;            // angle perturbation (max norm)
  double velocity_amplitude = 0.0;   // solenoidal velocity (max norm)
};

struct SteadySpec {
  std::string method = "newton";  // newton | gradient_flow
  std::string init = "cos";       // cos | random | constant
  double amplitude = 0.5;
  double tol = 1e-10;
  double max_time = 1e3;
  double tau = 0.1;
};

/// Everything a run needs.  Parsed from flat "section.key = value" text.
struct RunConfig {
  int n = 64;
  std::array<double, 6> alpha{0.0, -1.0, 0.0, 1.0, 1.0, 0.0};
  double gamma = 0.5;
  double reynolds = 1.0;
  double h_field = 0.0;
  Winding winding;
  InitialSpec initial;
  double dt = 1e-3;
  double t_end = 1.0;
  int sample_every = 1;
  int snapshot_every = 0;  // in steps; 0 writes only the final state
  std::string output_dir = "out";
  std::string reference = "none";  // none | steady: fills dist_h2
  DynamicsOptions mode;
  SteadySpec steady;
};

/// Parses config text.  Unknown keys, malformed values and duplicate keys
/// raise ParseError naming the source line.  Material admissibility is not
/// checked here.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical key = value text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.  The output
/// directory is excluded so a run can be reproduced elsewhere.
std::string config_hash(const RunConfig& c);

struct RelationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<RelationCheck> checks;
  bool ok = false;
  // Derived constants; meaningful when gamma1 != 0.
  double gamma1 = 0.0, gamma2 = 0.0, mu1 = 0.0, mu2 = 0.0, beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
};

/// Evaluates every admissibility relation independently.
ValidationReport validate_config(const RunConfig& c);

/// derive_params for the configured material; throws on violation.
MaterialParams material_of(const RunConfig& c);

}  // namespace els
