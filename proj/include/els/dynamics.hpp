#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "els/director.hpp"
#include "els/field.hpp"
#include "els/material.hpp"
#include "els/spectral.hpp"

namespace els {

struct SimState {
  VectorField2 v;
  AngleField theta;
  double t = 0.0;

  const Grid& grid() const noexcept { return v.grid(); }
};

enum class Integrator { euler, bdf2 };

struct DynamicsOptions {
  /// Drops every (1 - gamma)/Re term from the momentum equation.
  bool coupling_off = false;
  Integrator integrator = Integrator::euler;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double energy_E = 0.0;
  double dissipation_D = 0.0;
  double energy_EH = 0.0;
  double v_l2 = 0.0;
  double v_h1 = 0.0;
  double theta_residual = 0.0;
  std::optional<double> dist_h2;
};

/// Delta theta + (H^2/2) sin 2 theta, the director residual.
ScalarField director_residual(const AngleField& theta, const MaterialParams& p);

/// Full tendency of the angle remainder, products dealiased.
ScalarField rhs_theta(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt = {});

/// Leray-projected full velocity tendency.
VectorField2 rhs_velocity(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt = {});

/// P[(1-gamma)/Re (div sigma_1 + F_theta)]: the director-induced part of the
/// momentum tendency, assembled in angle form.
VectorField2 director_forcing(const SimState& s, const MaterialParams& p);

/// Largest admissible time step for the explicit terms.
double max_stable_dt(const SimState& s, const MaterialParams& p);

/// Time stepper.  The Euler step is IMEX: diffusion of v and of the angle
/// remainder is solved exactly in Fourier space and the rest is explicit.
/// The BDF2 step is linearly implicit in the full tendency (matrix-free
/// GMRES, preconditioned by the Euler diagonal solve); it keeps one step of
/// history and restarts with Euler whenever dt or the winding changes.
class Stepper {
 public:
  Stepper(MaterialParams p, DynamicsOptions opt);

  SimState step(const SimState& s, double dt);
  void reset() { history_.reset(); }

  /// Viscosity of the implicit velocity solve.  It contains gamma/Re, the
  /// isotropic beta2 part of the Leslie stress and a stabilizing term that
  /// is added implicitly and subtracted explicitly.
  double implicit_viscosity() const noexcept { return implicit_viscosity_; }
  const MaterialParams& params() const noexcept { return params_; }
  const DynamicsOptions& options() const noexcept { return options_; }

 private:
  struct History {
    double dt;
    SimState state;  // previous level
  };

  SimState step_euler(const SimState& s, double dt) const;
  SimState step_bdf2(const SimState& s, double dt) const;

  MaterialParams params_;
  DynamicsOptions options_;
  double implicit_viscosity_;
  std::optional<History> history_;
};

/// One first-order IMEX step.
SimState step(const SimState& s, const MaterialParams& p, double dt, const DynamicsOptions& opt = {});

/// 1/2 int |v|^2 + (1-gamma)/Re (|grad d|^2 + |H|^2 - (H.d)^2).
double energy(const SimState& s, const MaterialParams& p);

/// Instantaneous dissipation; energy decreases at exactly this rate.
double dissipation(const SimState& s, const MaterialParams& p);

/// ||grad v||^2 + (1-gamma)/Re ||Delta theta + (H^2/2) sin 2theta||^2.
double energy_EH(const SimState& s, const MaterialParams& p);

DiagnosticsRecord diagnose(const SimState& s, const MaterialParams& p);

struct RunOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  int sample_every = 1;
  /// Optional distance of a state to a reference solution (dist_h2 column).
  std::function<std::optional<double>(const SimState&)> distance;
  /// Called after every sample with its record; lets callers stream output.
  std::function<void(const SimState&, const DiagnosticsRecord&, long long step)> on_sample;
  /// Receives the last good state before a step error is rethrown.
  std::function<void(const SimState&)> on_failure;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  SimState final_state;
};

RunResult run(const SimState& s0, const MaterialParams& p, const RunOptions& ro, const DynamicsOptions& opt = {});

}  // namespace els
