#include "els/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "els/spectral.hpp"
#include "krylov.hpp"

namespace els {

AngleField SteadySolution::theta() const {
  const Winding w = psi.winding();
  return AngleField(0.5 * psi.remainder(), Winding{w.a1 / 2, w.a2 / 2});
}

const char* to_string(SteadyClass c) { return c == SteadyClass::constant ? "constant" : "nonconstant"; }

double lambda2(const Grid& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) {
      const double k1 = grid.wavenumber(i), k2 = grid.wavenumber(j);
      const double kk = k1 * k1 + k2 * k2;
      if (kk > 0.0) best = std::min(best, kk);
    }
  }
  return best;
}

double rayleigh_quotient(const ScalarField& f) {
  ScalarField c = f;
  c += -f.mean();
  const double denom = inner(c, c);
  if (!(denom > 0.0)) throw Error(ErrorCode::InvalidArgument, "Rayleigh quotient of a constant");
  const VectorField2 g = gradient(f);
  return inner(g, g) / denom;
}

ScalarField steady_residual(const AngleField& psi, double h_squared) {
  ScalarField r = psi.laplacian();
  const ScalarField full = psi.full();
  for (std::size_t q = 0; q < r.grid().size(); ++q) r[q] += h_squared * std::sin(full[q]);
  return r;
}

double steady_residual_l2(const AngleField& psi, double h_squared) {
  const ScalarField r = steady_residual(psi, h_squared);
  return std::sqrt(inner(r, r));
}

double energy_I(const AngleField& psi, double h_field) {
  const VectorField2 g = psi.gradient();
  const ScalarField full = psi.full();
  const double h2 = h_field * h_field;
  double potential = 0.0;
  for (std::size_t q = 0; q < full.grid().size(); ++q) potential += std::cos(full[q]) - 1.0;
  const double area = full.grid().spacing() * full.grid().spacing();
  return 0.5 * inner(g, g) + h2 * area * potential;
}

double energy_E(const AngleField& theta, double h_field) {
  const VectorField2 g = theta.gradient();
  const ScalarField full = theta.full();
  const double h2 = h_field * h_field;
  double potential = 0.0;
  for (std::size_t q = 0; q < full.grid().size(); ++q) potential += 1.0 + std::cos(2.0 * full[q]);
  const double area = full.grid().spacing() * full.grid().spacing();
  return 0.5 * inner(g, g) + 0.25 * h2 * area * potential;
}

AngleField psi_from_theta(const AngleField& theta) {
  const Winding w = theta.winding();
  return AngleField(2.0 * theta.remainder(), Winding{2 * w.a1, 2 * w.a2});
}

namespace {

void check_problem(const SteadyProblem& prob, const AngleField& psi, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (!std::isfinite(prob.h_field)) throw Error(ErrorCode::RangeError, "H must be finite");
  require_same_grid(prob.grid, psi.grid());
  const Winding w = psi.winding();
  if (w.a1 != 2 * prob.winding.a1 || w.a2 != 2 * prob.winding.a2)
    throw Error(ErrorCode::WindingMismatch, "initial psi must carry winding 2a");
}

bool constant_up_to_background(const AngleField& psi) {
  ScalarField r = psi.remainder();
  r += -r.mean();
  return r.max_abs() < 1e-8;
}

SteadySolution finish(AngleField psi, double h2, bool converged, int iterations, std::vector<double> history) {
  const double res = steady_residual_l2(psi, h2);
  const bool flat = constant_up_to_background(psi);
  return SteadySolution{std::move(psi), res, converged, flat, iterations, std::move(history)};
}

}  // namespace

SteadySolution solve_gradient_flow(const SteadyProblem& prob, const AngleField& psi_init, double tol,
                                   double max_time, const GradientFlowOptions& opt) {
  check_problem(prob, psi_init, tol);
  if (!(opt.tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  const double h2 = prob.h_squared();
  const double tau = opt.tau;
  // The explicit part H^2 sin psi has Lipschitz constant H^2; stabilizing
  // with S = H^2 makes every step decrease I.
  const double S = h2;
  const Grid& g = prob.grid;

  AngleField psi = psi_init;
  std::vector<double> history{energy_I(psi, prob.h_field)};
  const long max_steps = static_cast<long>(std::ceil(max_time / tau));
  int steps = 0;
  for (long it = 0;; ++it) {
    if (steady_residual_l2(psi, h2) < tol) return finish(std::move(psi), h2, true, steps, std::move(history));
    if (it >= max_steps) break;

    const ScalarField full = psi.full();
    ScalarField rhs = psi.remainder();
    for (std::size_t q = 0; q < g.size(); ++q) rhs[q] += tau * (h2 * std::sin(full[q]) + S * rhs[q]);
    Spectrum s = forward(rhs);
    for (int i = 0; i < g.n(); ++i) {
      const double k1 = g.wavenumber(i);
      for (int j = 0; j < s.columns(); ++j) {
        const double k2 = g.wavenumber(j);
        s(i, j) /= 1.0 + tau * S + tau * (k1 * k1 + k2 * k2);
      }
    }
    psi.remainder() = inverse(std::move(s));
    if (!psi.remainder().all_finite()) throw Error(ErrorCode::BlowupDetected, "gradient flow produced NaN");
    history.push_back(energy_I(psi, prob.h_field));
    ++steps;
  }
  return finish(std::move(psi), h2, false, steps, std::move(history));
}

namespace {

using detail::Vec;
using detail::gmres;

Vec to_vec(const ScalarField& f) { return Vec(f.values().begin(), f.values().end()); }

}  // namespace

SteadySolution solve_newton(const SteadyProblem& prob, const AngleField& psi_init, double tol,
                            const NewtonOptions& opt) {
  check_problem(prob, psi_init, tol);
  const double h2 = prob.h_squared();
  const Grid& g = prob.grid;
  const double shift = std::max(h2, 1.0);

  AngleField psi = psi_init;
  ScalarField F = steady_residual(psi, h2);
  double fnorm = std::sqrt(inner(F, F));

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (fnorm < tol) return finish(std::move(psi), h2, true, it, {});

    const ScalarField full = psi.full();
    const ScalarField c = map(full, [h2](double x) { return h2 * std::cos(x); });
    // A x = -Delta x - H^2 cos(psi) x, the negated Jacobian.
    auto A = [&](const Vec& x) {
      const ScalarField xf(g, x);
      ScalarField out = laplacian(xf);
      for (std::size_t q = 0; q < g.size(); ++q) out[q] = -out[q] - c[q] * xf[q];
      return to_vec(out);
    };
    auto Minv = [&](const Vec& y) {
      Spectrum s = forward(ScalarField(g, y));
      for (int i = 0; i < g.n(); ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < s.columns(); ++j) {
          const double k2 = g.wavenumber(j);
          s(i, j) /= k1 * k1 + k2 * k2 + shift;
        }
      }
      return to_vec(inverse(std::move(s)));
    };

    const double eta = std::clamp(fnorm, 1e-13, 1e-2);
    const detail::GmresResult lin = gmres(A, Minv, to_vec(F), eta, opt.krylov_dim, opt.max_restarts);
    if (!std::isfinite(lin.relative_residual) || lin.relative_residual > 0.5) {
      std::ostringstream msg;
      msg << "Jacobian solve stagnated at relative residual " << lin.relative_residual << " (iteration " << it << ")";
      throw Error(ErrorCode::SingularLinearization, msg.str());
    }
    const ScalarField delta(g, lin.x);

    double lambda = 1.0;
    for (;;) {
      AngleField trial = psi;
      ScalarField step = delta;
      step *= lambda;
      trial.remainder() += step;
      ScalarField Ft = steady_residual(trial, h2);
      const double tnorm = std::sqrt(inner(Ft, Ft));
      const bool sufficient = tnorm < (1.0 - 1e-4 * lambda) * fnorm;
      if (sufficient || lambda <= opt.min_damping) {
        psi = std::move(trial);
        F = std::move(Ft);
        fnorm = tnorm;
        break;
      }
      lambda *= 0.5;
    }
    if (!std::isfinite(fnorm)) throw Error(ErrorCode::BlowupDetected, "Newton iterate is not finite");
  }
  const bool ok = fnorm < tol;
  return finish(std::move(psi), h2, ok, opt.max_iterations, {});
}

SteadyClass classify(const SteadySolution& sol) {
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "cannot classify an unconverged solution (residual " << sol.residual_l2 << ")";
    throw Error(ErrorCode::UnconvergedInput, msg.str());
  }
  const Winding w = sol.psi.winding();
  if (w.a1 != 0 || w.a2 != 0) return SteadyClass::nonconstant;
  return constant_up_to_background(sol.psi) ? SteadyClass::constant : SteadyClass::nonconstant;
}

namespace {

void require_same_winding(const AngleField& a, const AngleField& b) {
  require_same_grid(a.grid(), b.grid());
  if (!(a.winding() == b.winding())) throw Error(ErrorCode::WindingMismatch, "angle fields differ in winding");
}

// a - b with the multiple of `period` nearest in mean removed.
ScalarField periodic_difference(const AngleField& a, const AngleField& b, double period, long* k_out = nullptr) {
  ScalarField d = a.remainder() - b.remainder();
  const long k = std::lround(d.mean() / period);
  d += -static_cast<double>(k) * period;
  if (k_out) *k_out = k;
  return d;
}

}  // namespace

double distance_mod_period(const AngleField& a, const AngleField& b, double period, int order) {
  require_same_winding(a, b);
  return sobolev_norm(periodic_difference(a, b, period), order);
}

Alignment align(const AngleField& candidate, const AngleField& reference, double period) {
  require_same_winding(candidate, reference);
  const Grid& g = candidate.grid();
  const int n = g.n();
  const ScalarField& c = candidate.remainder();
  const ScalarField& r = reference.remainder();

  // Whole-cell search.  The shift minimizing the variance of the difference
  // maximizes the cross-correlation of the remainders.
  Spectrum cross = forward(c);
  const Spectrum rs = forward(r);
  for (std::size_t q = 0; q < cross.size(); ++q) cross.data()[q] *= std::conj(rs.data()[q]);
  const ScalarField corr = inverse(std::move(cross));
  int best1 = 0, best2 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (corr(i, j) > corr(best1, best2)) {
        best1 = i;
        best2 = j;
      }

  // Gauss-Newton refinement of the continuous offset.
  double w1 = best1 * g.spacing(), w2 = best2 * g.spacing();
  for (int it = 0; it < 30; ++it) {
    const AngleField moved = candidate.shifted(w1, w2);
    const ScalarField res = periodic_difference(moved, reference, period);
    const VectorField2 J = moved.gradient();
    double a11 = inner(J.u1, J.u1), a12 = inner(J.u1, J.u2), a22 = inner(J.u2, J.u2);
    const double b1 = -inner(J.u1, res), b2 = -inner(J.u2, res);
    // Directions along which the field is invariant carry no information.
    const double damp = 1e-12 * (a11 + a22) + 1e-300;
    a11 += damp;
    a22 += damp;
    const double det = a11 * a22 - a12 * a12;
    const double d1 = (a22 * b1 - a12 * b2) / det;
    const double d2 = (a11 * b2 - a12 * b1) / det;
    if (!std::isfinite(d1) || !std::isfinite(d2)) break;
    w1 += d1;
    w2 += d2;
    if (std::abs(d1) + std::abs(d2) < 1e-15) break;
  }
  // Keep the refinement only when it helps.
  AngleField moved = candidate.shifted(w1, w2);
  long k = 0;
  ScalarField res = periodic_difference(moved, reference, period, &k);
  const AngleField whole = candidate.shifted(best1 * g.spacing(), best2 * g.spacing());
  long kw = 0;
  const ScalarField resw = periodic_difference(whole, reference, period, &kw);
  if (inner(resw, resw) < inner(res, res)) {
    w1 = best1 * g.spacing();
    w2 = best2 * g.spacing();
    moved = whole;
    res = resw;
    k = kw;
  }
  moved += -static_cast<double>(k) * period;
  return Alignment{w1, w2, -k, moved, sobolev_norm(res, 1)};
}

}  // namespace els
