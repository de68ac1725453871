#pragma once

#include <array>

namespace els {

/// Leslie coefficients plus the flow parameters, with every derived constant
/// the evolution needs.  Construct through derive_params(); the raw
/// constructor is not exposed so admissibility is always checked.
struct MaterialParams {
  std::array<double, 6> alpha{};  // alpha1..alpha6
  double gamma = 0.5;             // viscosity split, in (0,1)
  double reynolds = 1.0;
  double h_field = 0.0;  // magnitude of H = H (1,0)^T

  double gamma1 = 0.0;  // alpha3 - alpha2
  double gamma2 = 0.0;  // alpha5 - alpha6
  double mu1 = 0.0;     // 1 / gamma1
  double mu2 = 0.0;     // gamma2 / gamma1
  double beta1 = 0.0;   // alpha1 + gamma2^2 / gamma1
  double beta2 = 0.0;   // alpha4
  double beta3 = 0.0;   // alpha5 + alpha6 - gamma2^2 / gamma1

  double alpha_at(int k) const { return alpha.at(static_cast<std::size_t>(k - 1)); }
  double h_squared() const { return h_field * h_field; }
  /// (1 - gamma) / Re, the weight of every director-induced term.
  double coupling() const { return (1.0 - gamma) / reynolds; }
  /// gamma / Re.
  double viscosity() const { return gamma / reynolds; }
};

/// Tolerance for exact algebraic relations among coefficients.
inline constexpr double kRelationTolerance = 1e-12;

/// Validates the inputs and fills in the derived constants.  Throws
/// els::Error with ParodiViolation, NonPositiveGamma1, DissipationViolation
/// or RangeError, naming the failed relation.
MaterialParams derive_params(const std::array<double, 6>& alpha, double gamma, double reynolds, double h_field);

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// beta1 (d (x) d : D)^2 + beta2 D:D + beta3 |D d|^2 for trace-free D and unit d.
double dissipation_quadratic(const Sym2& D, double d1, double d2, const MaterialParams& p);

}  // namespace els
