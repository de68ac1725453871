#include "els/material.hpp"

#include <cmath>
#include <sstream>

#include "els/error.hpp"

namespace els {

MaterialParams derive_params(const std::array<double, 6>& alpha, double gamma, double reynolds, double h_field) {
  for (double a : alpha)
    if (!std::isfinite(a)) throw Error(ErrorCode::RangeError, "Leslie coefficients must be finite");
  if (!std::isfinite(gamma) || !(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::RangeError, "gamma must lie in (0,1)");
  if (!std::isfinite(reynolds) || !(reynolds > 0.0)) throw Error(ErrorCode::RangeError, "Re must be > 0");
  if (!std::isfinite(h_field) || !(h_field >= 0.0)) throw Error(ErrorCode::RangeError, "H must be >= 0");

  MaterialParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.reynolds = reynolds;
  p.h_field = h_field;

  const double a1 = alpha[0], a2 = alpha[1], a3 = alpha[2], a4 = alpha[3], a5 = alpha[4], a6 = alpha[5];
  const double parodi = (a2 + a3) - (a6 - a5);
  if (std::abs(parodi) >= kRelationTolerance) {
    std::ostringstream msg;
    msg << "alpha2+alpha3 = " << a2 + a3 << " but alpha6-alpha5 = " << a6 - a5;
    throw Error(ErrorCode::ParodiViolation, msg.str());
  }

  p.gamma1 = a3 - a2;
  p.gamma2 = a5 - a6;
  if (!(p.gamma1 > 0.0)) {
    std::ostringstream msg;
    msg << "gamma1 = alpha3-alpha2 = " << p.gamma1 << " must be > 0";
    throw Error(ErrorCode::NonPositiveGamma1, msg.str());
  }
  p.mu1 = 1.0 / p.gamma1;
  p.mu2 = p.gamma2 / p.gamma1;
  p.beta1 = a1 + p.gamma2 * p.gamma2 / p.gamma1;
  p.beta2 = a4;
  p.beta3 = a5 + a6 - p.gamma2 * p.gamma2 / p.gamma1;

  const double s1 = p.beta1 + 2.0 * p.beta2 + p.beta3;
  const double s2 = 2.0 * p.beta2 + p.beta3;
  if (s1 < 0.0 || s2 < 0.0) {
    std::ostringstream msg;
    msg << "need beta1+2beta2+beta3 >= 0 (" << s1 << ") and 2beta2+beta3 >= 0 (" << s2 << ")";
    throw Error(ErrorCode::DissipationViolation, msg.str());
  }
  return p;
}

double dissipation_quadratic(const Sym2& D, double d1, double d2, const MaterialParams& p) {
  if (std::abs(D.xx + D.yy) >= kRelationTolerance)
    throw Error(ErrorCode::InvalidArgument, "D must be trace free");
  if (std::abs(std::hypot(d1, d2) - 1.0) >= kRelationTolerance)
    throw Error(ErrorCode::InvalidArgument, "d must be a unit vector");
  const double ddD = d1 * d1 * D.xx + 2.0 * d1 * d2 * D.xy + d2 * d2 * D.yy;
  const double DD = D.xx * D.xx + 2.0 * D.xy * D.xy + D.yy * D.yy;
  const double Dd1 = D.xx * d1 + D.xy * d2;
  const double Dd2 = D.xy * d1 + D.yy * d2;
  return p.beta1 * ddD * ddD + p.beta2 * DD + p.beta3 * (Dd1 * Dd1 + Dd2 * Dd2);
}

}  // namespace els
