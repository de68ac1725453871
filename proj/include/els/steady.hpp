#pragma once

#include <vector>

#include "els/director.hpp"
#include "els/field.hpp"

namespace els {

/// -Delta psi = H^2 sin psi on the unit torus with psi(x + e_i) = psi(x) + 2 a_i pi.
struct SteadyProblem {
  Grid grid;
  double h_field = 0.0;
  Winding winding;  // winding of theta; psi carries (2 a1, 2 a2)

  double h_squared() const { return h_field * h_field; }
};

struct SteadySolution {
  AngleField psi;
  double residual_l2 = 0.0;
  bool converged = false;
  bool is_constant = false;
  int iterations = 0;
  /// I(psi) per accepted iterate (gradient flow only).
  std::vector<double> energy_history;

  /// theta = psi / 2 with the winding of the original problem.
  AngleField theta() const;
};

enum class SteadyClass { constant, nonconstant };
const char* to_string(SteadyClass c);

/// Smallest nonzero eigenvalue of the periodic -Delta on the grid's torus.
double lambda2(const Grid& grid);

/// int |grad f|^2 / int |f - mean f|^2.
double rayleigh_quotient(const ScalarField& f);

/// Delta psi + H^2 sin psi.
ScalarField steady_residual(const AngleField& psi, double h_squared);
double steady_residual_l2(const AngleField& psi, double h_squared);

/// I(psi) = int 1/2 |grad psi|^2 + H^2 (cos psi - 1).
double energy_I(const AngleField& psi, double h_field);
/// E(theta) = int 1/2 |grad theta|^2 + H^2/4 (1 + cos 2 theta).
double energy_E(const AngleField& theta, double h_field);

/// Embeds psi = 2 theta.
AngleField psi_from_theta(const AngleField& theta);

struct GradientFlowOptions {
  double tau = 0.1;  // pseudo time step
};

/// Stabilized semi-implicit gradient flow of I.  Returns the last iterate
/// with converged = false when max_time is reached first.
SteadySolution solve_gradient_flow(const SteadyProblem& prob, const AngleField& psi_init, double tol,
                                   double max_time, const GradientFlowOptions& opt = {});

struct NewtonOptions {
  int max_iterations = 60;
  int krylov_dim = 60;
  int max_restarts = 20;
  double min_damping = 1.0 / 1024.0;
};

/// Damped Newton on the periodic remainder with preconditioned GMRES for the
/// linearized operator -Delta - H^2 cos psi.  Throws SingularLinearization
/// when the Krylov solve stagnates; non-convergence is reported by the flag.
SteadySolution solve_newton(const SteadyProblem& prob, const AngleField& psi_init, double tol,
                            const NewtonOptions& opt = {});

/// Throws UnconvergedInput for an unconverged solution.
SteadyClass classify(const SteadySolution& sol);

/// Best match of `candidate` to `reference` over translations w and additive
/// multiples of `period` (pi for theta, 2 pi for psi).  Whole-cell shifts are
/// searched first, then the offset is refined continuously.
struct Alignment {
  double w1 = 0.0;
  double w2 = 0.0;
  long k = 0;
  AngleField aligned;
  double distance_h1 = 0.0;
};
Alignment align(const AngleField& candidate, const AngleField& reference, double period);

/// Distance after adding the multiple of `period` closest in mean; no shift.
double distance_mod_period(const AngleField& a, const AngleField& b, double period, int order);

}  // namespace els
