#include "els/longtime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "els/spectral.hpp"

namespace els {

double distance_to_steady(const SimState& s, const SteadySolution& ref, [[maybe_unused]] const MaterialParams& p) {
  const AngleField theta_inf = ref.theta();
  require_same_grid(s.grid(), theta_inf.grid());
  if (!(s.theta.winding() == theta_inf.winding()) || ref.psi.winding().a1 % 2 != 0 || ref.psi.winding().a2 % 2 != 0)
    throw Error(ErrorCode::WindingMismatch, "state and reference have different windings");
  return sobolev_norm(s.v, 1) + distance_mod_period(s.theta, theta_inf, kPi, 2);
}

double distance_to_steady_orbit(const SimState& s, const SteadySolution& ref, const MaterialParams& p) {
  const double d = distance_to_steady(s, ref, p);  // also checks grid and winding
  const Alignment al = align(ref.theta(), s.theta, kPi);
  return std::min(d, sobolev_norm(s.v, 1) + distance_mod_period(s.theta, al.aligned, kPi, 2));
}

const char* to_string(DecayModel m) { return m == DecayModel::exponential ? "exponential" : "algebraic"; }

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& dist, DecayModel model, FitBand band) {
  if (t.size() != dist.size()) throw Error(ErrorCode::InvalidArgument, "time and distance series differ in length");
  std::vector<double> xs, ys;
  double t_lo = 0.0, t_hi = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(dist[k] > 0.0)) {
      std::ostringstream msg;
      msg << "distance " << dist[k] << " at t = " << t[k] << " is not positive";
      throw Error(ErrorCode::NonPositiveDistances, msg.str());
    }
    if (dist[k] < band.lo || dist[k] > band.hi) continue;
    if (xs.empty()) t_lo = t[k];
    t_hi = t[k];
    xs.push_back(model == DecayModel::exponential ? t[k] : std::log1p(t[k]));
    ys.push_back(std::log(dist[k]));
  }
  if (xs.size() < 8) {
    std::ostringstream msg;
    msg << "only " << xs.size() << " samples inside [" << band.lo << ", " << band.hi << "], need 8";
    throw Error(ErrorCode::InsufficientSamples, msg.str());
  }

  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientSamples, "fit window has zero length");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (intercept + slope * xs[k]);
    sse += e * e;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;

  DecayFit fit;
  fit.model = model;
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = r2;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples_used = static_cast<int>(xs.size());
  return fit;
}

LimitStatus detect_limit(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no diagnostics to inspect");
  constexpr double kThreshold = 1e-10;
  constexpr double kSlack = 1e-14;
  const std::size_t window = std::min<std::size_t>(10, records.size());
  bool monotone = true;
  for (std::size_t k = records.size() - window + 1; k < records.size(); ++k)
    if (records[k].energy_EH > records[k - 1].energy_EH + kSlack) monotone = false;
  const double last = records.back().energy_EH;
  return LimitStatus{last < kThreshold && monotone, last};
}

nlohmann::ordered_json fit_report(const DecayFit& fit) {
  nlohmann::ordered_json j;
  j["model"] = to_string(fit.model);
  j["rate"] = fit.rate;
  j[fit.model == DecayModel::exponential ? "kappa" : "exponent"] = fit.rate;
  j["prefactor"] = fit.prefactor;
  j["r_squared"] = fit.r_squared;
  j["window"] = {fit.t_lo, fit.t_hi};
  j["samples_used"] = fit.samples_used;
  return j;
}

}  // namespace els
