#pragma once

#include <optional>
#include <string>

#include <json.hpp>
#include <vector>

#include "els/dynamics.hpp"
#include "els/steady.hpp"

namespace els {

/// ||v||_{H^1} + ||theta - theta_inf - k pi||_{H^2}, with theta_inf = psi/2 and
/// k the multiple of pi closest to the mean difference.
double distance_to_steady(const SimState& s, const SteadySolution& ref, const MaterialParams& p);

/// distance_to_steady against the translate of ref that best matches s.
/// Nonconstant steady states are only unique up to translation, and a run
/// converges to one of the translates, not necessarily ref itself.
double distance_to_steady_orbit(const SimState& s, const SteadySolution& ref, const MaterialParams& p);

enum class DecayModel { exponential, algebraic };
const char* to_string(DecayModel m);

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  /// kappa for the exponential model, the exponent p for the algebraic one.
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples_used = 0;
};

struct FitBand {
  double lo = 1e-8;
  double hi = 1e-1;
};

/// Least squares of log(dist) against t (exponential) or log(1 + t)
/// (algebraic), over the samples whose distance lies inside the band.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& dist, DecayModel model,
                   FitBand band = {});

struct LimitStatus {
  bool converged = false;
  double residual = 0.0;  // final E_H
};

/// Converged when the last E_H is below 1e-10 and E_H has not increased over
/// the last ten samples.
LimitStatus detect_limit(const std::vector<DiagnosticsRecord>& records);

/// JSON fit report: model, rate, kappa or exponent, r_squared, window, samples_used.
nlohmann::ordered_json fit_report(const DecayFit& fit);

}  // namespace els
