#include "els/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krylov.hpp"

namespace els {
namespace {

Spectrum masked(const ScalarField& f) {
  Spectrum s = forward(f);
  apply_dealias(s);
  return s;
}

Spectrum derived(Spectrum s, Axis axis) {
  differentiate(s, axis, 1);
  return s;
}

// Pointwise quantities every tendency needs, computed once per evaluation.
struct Kinematics {
  ScalarField grad1, grad2;  // grad theta, background included
  ScalarField lap;           // Delta theta
  ScalarField sin2, cos2;    // sin 2theta, cos 2theta
  VelocityGradient G;        // G_ij = d v_i / d x_j
};

Kinematics kinematics(const SimState& s) {
  const Spectrum th = forward(s.theta.remainder());
  Spectrum lap = th;
  apply_laplacian(lap);
  const Winding w = s.theta.winding();
  ScalarField grad1 = inverse(derived(th, Axis::x1));
  ScalarField grad2 = inverse(derived(th, Axis::x2));
  grad1 += kPi * w.a1;
  grad2 += kPi * w.a2;
  const ScalarField full = s.theta.full();
  return Kinematics{std::move(grad1),
                    std::move(grad2),
                    inverse(std::move(lap)),
                    map(full, [](double t) { return std::sin(2.0 * t); }),
                    map(full, [](double t) { return std::cos(2.0 * t); }),
                    velocity_gradient(s.v)};
}

// (1-gamma)/Re (div sigma_1 + F_theta) without the pure-gradient pieces,
// dealiased but not projected.
std::pair<Spectrum, Spectrum> director_forcing_spectra(const SimState& s, const Kinematics& k,
                                                       const MaterialParams& p) {
  const Grid& g = s.grid();
  const double mu2 = p.mu2;
  const double h2 = p.h_squared();
  ScalarField t11(g), t12(g), t21(g), t22(g), e1(g), e2(g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double s2 = k.sin2[q], c2 = k.cos2[q];
    // d (x) d for d = (sin, cos).
    const double dd11 = 0.5 * (1.0 - c2), dd22 = 0.5 * (1.0 + c2), dd12 = 0.5 * s2;
    const double D11 = k.G.g11[q], D22 = k.G.g22[q], D12 = 0.5 * (k.G.g12[q] + k.G.g21[q]);
    const double Ddd = D11 * dd11 + 2.0 * D12 * dd12 + D22 * dd22;
    // D dd + dd D (symmetric).
    const double s11 = 2.0 * (D11 * dd11 + D12 * dd12);
    const double s22 = 2.0 * (D12 * dd12 + D22 * dd22);
    const double s12 = D11 * dd12 + D12 * dd22 + dd11 * D12 + dd12 * D22;
    const double sig11 = p.beta1 * Ddd * dd11 + p.beta2 * D11 + 0.5 * p.beta3 * s11;
    const double sig22 = p.beta1 * Ddd * dd22 + p.beta2 * D22 + 0.5 * p.beta3 * s22;
    const double sig12 = p.beta1 * Ddd * dd12 + p.beta2 * D12 + 0.5 * p.beta3 * s12;

    // [1/2(-1-mu2) d_perp (x) d + 1/2(1-mu2) d (x) d_perp] R
    const double R = k.lap[q] + 0.5 * h2 * s2;
    const double m11 = -0.5 * mu2 * s2, m22 = 0.5 * mu2 * s2;
    const double m12 = -0.5 * (1.0 + mu2 * c2), m21 = 0.5 * (1.0 - mu2 * c2);

    t11[q] = sig11 + m11 * R;
    t12[q] = sig12 + m12 * R;
    t21[q] = sig12 + m21 * R;
    t22[q] = sig22 + m22 * R;
    // Ericksen stress minus its gradient part: -Delta theta grad theta.
    e1[q] = -k.lap[q] * k.grad1[q];
    e2[q] = -k.lap[q] * k.grad2[q];
  }
  Spectrum f1 = derived(masked(t11), Axis::x1);
  f1 += derived(masked(t12), Axis::x2);
  f1 += masked(e1);
  Spectrum f2 = derived(masked(t21), Axis::x1);
  f2 += derived(masked(t22), Axis::x2);
  f2 += masked(e2);
  f1 *= p.coupling();
  f2 *= p.coupling();
  return {std::move(f1), std::move(f2)};
}

struct Tendency {
  Spectrum theta;
  Spectrum v1;
  Spectrum v2;
};

Tendency assemble(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt) {
  const Grid& g = s.grid();
  require_same_grid(g, s.theta.grid());
  const Kinematics k = kinematics(s);
  const double h2 = p.h_squared();

  ScalarField nl(g), a1(g), a2(g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double v1 = s.v.u1[q], v2 = s.v.u2[q];
    const double omega = 0.5 * (k.G.g12[q] - k.G.g21[q]);
    const double D11 = k.G.g11[q], D12 = 0.5 * (k.G.g12[q] + k.G.g21[q]);
    const double strain = D11 * k.sin2[q] + D12 * k.cos2[q];
    nl[q] = -(v1 * k.grad1[q] + v2 * k.grad2[q]) + p.mu1 * 0.5 * h2 * k.sin2[q] + omega + p.mu2 * strain;
    a1[q] = -(v1 * k.G.g11[q] + v2 * k.G.g12[q]);
    a2[q] = -(v1 * k.G.g21[q] + v2 * k.G.g22[q]);
  }

  Spectrum theta = forward(s.theta.remainder());
  apply_laplacian(theta);
  theta *= p.mu1;
  theta += masked(nl);

  Spectrum v1 = forward(s.v.u1);
  Spectrum v2 = forward(s.v.u2);
  apply_laplacian(v1);
  apply_laplacian(v2);
  v1 *= p.viscosity();
  v2 *= p.viscosity();
  v1 += masked(a1);
  v2 += masked(a2);
  if (!opt.coupling_off) {
    auto [f1, f2] = director_forcing_spectra(s, k, p);
    v1 += f1;
    v2 += f2;
  }
  project(v1, v2);
  return Tendency{std::move(theta), std::move(v1), std::move(v2)};
}

// -|k|^2 for the mode at (i, j).
double minus_k2(const Grid& g, int i, int j) {
  const double k1 = g.wavenumber(i), k2 = g.wavenumber(j);
  return -(k1 * k1 + k2 * k2);
}

}  // namespace

ScalarField director_residual(const AngleField& theta, const MaterialParams& p) {
  ScalarField r = theta.laplacian();
  const ScalarField full = theta.full();
  const double h2 = p.h_squared();
  for (std::size_t q = 0; q < r.grid().size(); ++q) r[q] += 0.5 * h2 * std::sin(2.0 * full[q]);
  return r;
}

ScalarField rhs_theta(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt) {
  return inverse(assemble(s, p, opt).theta);
}

VectorField2 rhs_velocity(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt) {
  Tendency t = assemble(s, p, opt);
  return VectorField2(inverse(std::move(t.v1)), inverse(std::move(t.v2)));
}

VectorField2 director_forcing(const SimState& s, const MaterialParams& p) {
  auto [f1, f2] = director_forcing_spectra(s, kinematics(s), p);
  project(f1, f2);
  return VectorField2(inverse(std::move(f1)), inverse(std::move(f2)));
}

double max_stable_dt(const SimState& s, const MaterialParams& p) {
  const double advective = 0.5 * s.grid().spacing() / std::max(s.v.max_abs(), 1.0);
  const double reactive = 0.1 / (p.mu1 * p.h_squared() + 1.0);
  return std::min(advective, reactive);
}

namespace {

double stabilizing_viscosity(const MaterialParams& p, const DynamicsOptions& opt) {
  if (opt.coupling_off) return p.viscosity();
  // Isotropic part of the Leslie stress: div(beta2 D) = beta2/2 Delta v.
  // The stabilizer bounds the explicit anisotropic viscosity and the
  // velocity/director exchange through sigma_2 and Omega d.
  const double anisotropic = 0.5 * (std::abs(p.beta1) + std::abs(p.beta3));
  const double exchange = (1.0 + std::abs(p.mu2)) * (1.0 + std::abs(p.mu2)) / (4.0 * p.mu1);
  return p.viscosity() + p.coupling() * (0.5 * p.beta2 + anisotropic + exchange);
}

}  // namespace

Stepper::Stepper(MaterialParams p, DynamicsOptions opt)
    : params_(p), options_(opt), implicit_viscosity_(stabilizing_viscosity(p, opt)) {}

namespace {

using detail::Vec;

constexpr double kBlowupVelocity = 1e6;

void check_finite(const SimState& out) {
  if (!out.v.all_finite() || !out.theta.remainder().all_finite() || out.v.max_abs() > kBlowupVelocity) {
    std::ostringstream msg;
    msg << "solution blew up at t = " << out.t;
    throw Error(ErrorCode::BlowupDetected, msg.str());
  }
}

// State and tendency vectors for the BDF2 solve: remainder, v1, v2.
Vec pack(const ScalarField& a, const ScalarField& b, const ScalarField& c) {
  Vec out;
  out.reserve(3 * a.grid().size());
  for (const ScalarField* f : {&a, &b, &c}) out.insert(out.end(), f->values().begin(), f->values().end());
  return out;
}

ScalarField component(const Grid& g, const Vec& y, int k) {
  const auto first = y.begin() + static_cast<std::ptrdiff_t>(k * g.size());
  return ScalarField(g, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(g.size())));
}

SimState unpack(const Grid& g, const Vec& y, Winding w, double t) {
  return SimState{VectorField2(component(g, y, 1), component(g, y, 2)), AngleField(component(g, y, 0), w), t};
}

Vec tendency(const SimState& s, const MaterialParams& p, const DynamicsOptions& opt) {
  Tendency t = assemble(s, p, opt);
  return pack(inverse(std::move(t.theta)), inverse(std::move(t.v1)), inverse(std::move(t.v2)));
}

double max_abs(const Vec& y) {
  double m = 0.0;
  for (double x : y) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SimState Stepper::step(const SimState& s, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double limit = max_stable_dt(s, params_);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability limit " << limit << " at t = " << s.t;
    throw Error(ErrorCode::CFLViolation, msg.str());
  }
  const bool bdf2 = options_.integrator == Integrator::bdf2;
  SimState out = bdf2 && history_ && history_->dt == dt && history_->state.theta.winding() == s.theta.winding()
                     ? step_bdf2(s, dt)
                     : step_euler(s, dt);
  if (bdf2) history_ = History{dt, s};
  check_finite(out);
  return out;
}

SimState Stepper::step_euler(const SimState& s, double dt) const {
  Tendency t = assemble(s, params_, options_);
  const Grid& g = s.grid();
  Spectrum th = forward(s.theta.remainder());
  Spectrum v1 = forward(s.v.u1);
  Spectrum v2 = forward(s.v.u2);

  // Explicit remainder N = full tendency - implicit linear part.
  const double mu1 = params_.mu1;
  const double nu = implicit_viscosity_;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < th.columns(); ++j) {
      const double lk = minus_k2(g, i, j);
      th(i, j) = (th(i, j) + dt * (t.theta(i, j) - mu1 * lk * th(i, j))) / (1.0 - dt * mu1 * lk);
      v1(i, j) = (v1(i, j) + dt * (t.v1(i, j) - nu * lk * v1(i, j))) / (1.0 - dt * nu * lk);
      v2(i, j) = (v2(i, j) + dt * (t.v2(i, j) - nu * lk * v2(i, j))) / (1.0 - dt * nu * lk);
    }
  }
  apply_dealias(th);
  apply_dealias(v1);
  apply_dealias(v2);
  project(v1, v2);
  return SimState{VectorField2(inverse(std::move(v1)), inverse(std::move(v2))),
                  AngleField(inverse(std::move(th)), s.theta.winding()), s.t + dt};
}

// Linearly implicit BDF2: with y* = 2 y^n - y^{n-1} the new level is
// y* + delta where (3 - 2 dt T'(y*)) delta = 2 (y^{n-1} - y^n) + 2 dt T(y*).
// T' is applied by finite differences and the diagonal implicit solve of the
// Euler step serves as preconditioner.  Treating the whole linearization
// implicitly keeps the stiff velocity/director exchange out of the
// extrapolated explicit part.
SimState Stepper::step_bdf2(const SimState& s, double dt) const {
  const Grid& g = s.grid();
  const Winding w = s.theta.winding();
  const Vec yn = pack(s.theta.remainder(), s.v.u1, s.v.u2);
  const SimState& prev = history_->state;
  const Vec ym = pack(prev.theta.remainder(), prev.v.u1, prev.v.u2);
  const std::size_t N = yn.size();

  Vec ystar(N), b(N);
  for (std::size_t k = 0; k < N; ++k) ystar[k] = 2.0 * yn[k] - ym[k];
  const double t_new = s.t + dt;
  const Vec Tstar = tendency(unpack(g, ystar, w, t_new), params_, options_);
  for (std::size_t k = 0; k < N; ++k) b[k] = 2.0 * (ym[k] - yn[k]) + 2.0 * dt * Tstar[k];

  const double scale = 1.0 + max_abs(ystar);
  auto op = [&](const Vec& x) {
    const double xn = max_abs(x);
    Vec out(N, 0.0);
    if (xn == 0.0) return out;
    // Central differences keep the Jacobian error well below the solve tolerance.
    const double eps = 1e-5 * scale / xn;
    Vec up(N), down(N);
    for (std::size_t k = 0; k < N; ++k) {
      up[k] = ystar[k] + eps * x[k];
      down[k] = ystar[k] - eps * x[k];
    }
    const Vec Tp = tendency(unpack(g, up, w, t_new), params_, options_);
    const Vec Tm = tendency(unpack(g, down, w, t_new), params_, options_);
    for (std::size_t k = 0; k < N; ++k) out[k] = 3.0 * x[k] - dt * (Tp[k] - Tm[k]) / eps;
    return out;
  };
  const double mu1 = params_.mu1;
  const double nu = implicit_viscosity_;
  auto prec = [&](const Vec& x) {
    Spectrum parts[3] = {forward(component(g, x, 0)), forward(component(g, x, 1)), forward(component(g, x, 2))};
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < parts[0].columns(); ++j) {
        const double lk = minus_k2(g, i, j);
        parts[0](i, j) /= 3.0 - 2.0 * dt * mu1 * lk;
        parts[1](i, j) /= 3.0 - 2.0 * dt * nu * lk;
        parts[2](i, j) /= 3.0 - 2.0 * dt * nu * lk;
      }
    }
    return pack(inverse(std::move(parts[0])), inverse(std::move(parts[1])), inverse(std::move(parts[2])));
  };

  // Relative tolerance with an absolute floor near round-off of the state.
  const double bn = max_abs(b);
  const double rtol = bn == 0.0 ? 1.0 : std::max(1e-10, 1e-13 * scale / bn);
  const detail::GmresResult lin = detail::gmres(op, prec, b, rtol, 40, 10);
  if (!std::isfinite(lin.relative_residual) || lin.relative_residual > std::max(1e-6, 10.0 * rtol)) {
    std::ostringstream msg;
    msg << "BDF2 linear solve stalled at relative residual " << lin.relative_residual << " at t = " << s.t;
    throw Error(ErrorCode::NotConverged, msg.str());
  }

  Vec ynew(N);
  for (std::size_t k = 0; k < N; ++k) ynew[k] = ystar[k] + lin.x[k];
  Spectrum th = forward(component(g, ynew, 0));
  Spectrum v1 = forward(component(g, ynew, 1));
  Spectrum v2 = forward(component(g, ynew, 2));
  apply_dealias(th);
  apply_dealias(v1);
  apply_dealias(v2);
  project(v1, v2);
  return SimState{VectorField2(inverse(std::move(v1)), inverse(std::move(v2))), AngleField(inverse(std::move(th)), w),
                  t_new};
}

SimState step(const SimState& s, const MaterialParams& p, double dt, const DynamicsOptions& opt) {
  DynamicsOptions euler = opt;
  euler.integrator = Integrator::euler;
  return Stepper(p, euler).step(s, dt);
}

double energy(const SimState& s, const MaterialParams& p) {
  const Grid& g = s.grid();
  const VectorField2 grad = s.theta.gradient();
  const ScalarField full = s.theta.full();
  const double h2 = p.h_squared();
  double kinetic = 0.0, elastic = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    kinetic += s.v.u1[q] * s.v.u1[q] + s.v.u2[q] * s.v.u2[q];
    const double c = std::cos(full[q]);
    elastic += grad.u1[q] * grad.u1[q] + grad.u2[q] * grad.u2[q] + h2 * c * c;
  }
  const double area = g.spacing() * g.spacing();
  return 0.5 * area * (kinetic + p.coupling() * elastic);
}

double dissipation(const SimState& s, const MaterialParams& p) {
  const Grid& g = s.grid();
  const VelocityGradient G = velocity_gradient(s.v);
  const VectorField2 h = molecular_field(s.theta, p);
  const ScalarField full = s.theta.full();
  double viscous = 0.0, director = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double g11 = G.g11[q], g12 = G.g12[q], g21 = G.g21[q], g22 = G.g22[q];
    viscous += g11 * g11 + g12 * g12 + g21 * g21 + g22 * g22;
    const double d1 = std::sin(full[q]), d2 = std::cos(full[q]);
    const double D11 = g11, D22 = g22, D12 = 0.5 * (g12 + g21);
    const double ddD = d1 * d1 * D11 + 2.0 * d1 * d2 * D12 + d2 * d2 * D22;
    const double DD = D11 * D11 + 2.0 * D12 * D12 + D22 * D22;
    const double Dd1 = D11 * d1 + D12 * d2, Dd2 = D12 * d1 + D22 * d2;
    const double hd = h.u1[q] * d1 + h.u2[q] * d2;
    const double hh = h.u1[q] * h.u1[q] + h.u2[q] * h.u2[q];
    director += p.beta1 * ddD * ddD + p.beta2 * DD + p.beta3 * (Dd1 * Dd1 + Dd2 * Dd2) + p.mu1 * (hh - hd * hd);
  }
  const double area = g.spacing() * g.spacing();
  return area * (p.viscosity() * viscous + p.coupling() * director);
}

double energy_EH(const SimState& s, const MaterialParams& p) {
  const VelocityGradient G = velocity_gradient(s.v);
  const ScalarField r = director_residual(s.theta, p);
  return inner(G.g11, G.g11) + inner(G.g12, G.g12) + inner(G.g21, G.g21) + inner(G.g22, G.g22) +
         p.coupling() * inner(r, r);
}

DiagnosticsRecord diagnose(const SimState& s, const MaterialParams& p) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.energy_E = energy(s, p);
  r.dissipation_D = dissipation(s, p);
  r.energy_EH = energy_EH(s, p);
  r.v_l2 = std::sqrt(inner(s.v, s.v));
  r.v_h1 = sobolev_norm(s.v, 1);
  const ScalarField res = director_residual(s.theta, p);
  r.theta_residual = std::sqrt(inner(res, res));
  return r;
}

RunResult run(const SimState& s0, const MaterialParams& p, const RunOptions& ro, const DynamicsOptions& opt) {
  if (!(ro.t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (!(ro.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (ro.sample_every < 1) throw Error(ErrorCode::InvalidArgument, "sample_every must be >= 1");
  const long long steps = std::llround(ro.t_end / ro.dt);
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "t_end shorter than one step");

  Stepper stepper(p, opt);
  RunResult result{{}, s0};
  auto sample = [&](const SimState& s, long long n) {
    DiagnosticsRecord rec = diagnose(s, p);
    if (ro.distance) rec.dist_h2 = ro.distance(s);
    result.records.push_back(rec);
    if (ro.on_sample) ro.on_sample(s, rec, n);
  };

  SimState s = s0;
  sample(s, 0);
  for (long long n = 1; n <= steps; ++n) {
    try {
      s = stepper.step(s, ro.dt);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "step " << n << " from t = " << s.t << " failed: " << e.what();
      if (ro.on_failure) ro.on_failure(s);
      throw Error(e.code(), msg.str());
    }
    if (n % ro.sample_every == 0 || n == steps) sample(s, n);
  }
  result.final_state = std::move(s);
  return result;
}

}  // namespace els
