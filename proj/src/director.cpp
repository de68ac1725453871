#include "els/director.hpp"

#include <cmath>
#include <string>

#include "els/spectral.hpp"

namespace els {

AngleField::AngleField(ScalarField remainder, Winding winding)
    : remainder_(std::move(remainder)), winding_(winding) {}

AngleField AngleField::constant(const Grid& grid, double value, Winding winding) {
  return AngleField(ScalarField(grid, value), winding);
}

double AngleField::at(int i, int j) const noexcept {
  const Grid& g = grid();
  return remainder_(i, j) + background(g.coord(i), g.coord(j));
}

ScalarField AngleField::full() const {
  ScalarField out = remainder_;
  const int n = grid().n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = at(i, j);
  return out;
}

VectorField2 AngleField::gradient() const {
  VectorField2 g = els::gradient(remainder_);
  g.u1 += kPi * winding_.a1;
  g.u2 += kPi * winding_.a2;
  return g;
}

ScalarField AngleField::laplacian() const { return els::laplacian(remainder_); }

AngleField AngleField::shifted(double w1, double w2) const {
  ScalarField r = spectral_shift(remainder_, w1, w2);
  r += background(w1, w2);
  return AngleField(std::move(r), winding_);
}

double DirectorField::unit_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < d1.grid().size(); ++k)
    worst = std::max(worst, std::abs(std::hypot(d1[k], d2[k]) - 1.0));
  return worst;
}

DirectorField angle_to_director(const AngleField& theta) {
  const ScalarField full = theta.full();
  return DirectorField{map(full, [](double t) { return std::sin(t); }),
                       map(full, [](double t) { return std::cos(t); })};
}

namespace {

constexpr double kUnitTolerance = 1e-10;
constexpr double kResolvedJump = kPi / 2.0;

double wrap_to_pi(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

// Local angle of the director; theta = atan2(d1, d2) because d = (sin, cos).
double local_angle(const DirectorField& d, int i, int j) { return std::atan2(d.d1(i, j), d.d2(i, j)); }

void check_unit(const DirectorField& d) {
  const double defect = d.unit_defect();
  if (defect > kUnitTolerance)
    throw Error(ErrorCode::NonUnitDirector, "director deviates from unit length by " + std::to_string(defect));
}

// Continues a lifted angle to a neighbour whose local angle is `next`.
double continue_lift(double lifted, double next, int i, int j) {
  const double jump = wrap_to_pi(next - lifted);
  if (std::abs(jump) > kResolvedJump)
    throw Error(ErrorCode::UnresolvedField,
                "angle jump " + std::to_string(jump) + " between neighbours near (" + std::to_string(i) + "," +
                    std::to_string(j) + ")");
  return lifted + jump;
}

// Continues across the periodic seam, where d may have flipped sign; the
// continuation is taken modulo pi and the jump must still be resolved.
double continue_across_seam(double lifted, double next, int i, int j) {
  double jump = next - lifted;
  jump -= kPi * std::round(jump / kPi);
  if (std::abs(jump) > kResolvedJump)
    throw Error(ErrorCode::UnresolvedField,
                "seam jump unresolved near (" + std::to_string(i) + "," + std::to_string(j) + ")");
  return lifted + jump;
}

int seam_winding(double start, double across, const char* axis) {
  const double turns = (across - start) / kPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw Error(ErrorCode::UnresolvedField, std::string("non-integer winding along ") + axis);
  return static_cast<int>(rounded);
}

struct Lift {
  ScalarField theta;
  Winding winding;
};

Lift lift(const DirectorField& d, double anchor) {
  check_unit(d);
  const Grid& g = d.grid();
  const int n = g.n();
  ScalarField theta(g);

  const double origin = local_angle(d, 0, 0);
  theta(0, 0) = origin + kTwoPi * std::round((anchor - origin) / kTwoPi);

  // First along x1 on the line j = 0, then along x2 from every point of it.
  for (int i = 1; i < n; ++i) theta(i, 0) = continue_lift(theta(i - 1, 0), local_angle(d, i, 0), i, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n; ++j) theta(i, j) = continue_lift(theta(i, j - 1), local_angle(d, i, j), i, j);

  const double across1 = continue_across_seam(theta(n - 1, 0), local_angle(d, 0, 0), n - 1, 0);
  const double across2 = continue_across_seam(theta(0, n - 1), local_angle(d, 0, 0), 0, n - 1);
  const Winding w{seam_winding(theta(0, 0), across1, "x1"), seam_winding(theta(0, 0), across2, "x2")};
  return {std::move(theta), w};
}

}  // namespace

AngleField director_to_angle(const DirectorField& d, double anchor) {
  Lift l = lift(d, anchor);
  const Grid& g = d.grid();
  AngleField out(std::move(l.theta), l.winding);
  ScalarField& r = out.remainder();
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) r(i, j) -= out.background(g.coord(i), g.coord(j));
  return out;
}

Winding winding_numbers(const DirectorField& d) { return lift(d, 0.0).winding; }

namespace {

// z = exp(i theta) = d2 + i d1 = exp(i pi a.x) * exp(i theta_rem).  The
// periodic factor is transformed; derivatives act as i (k + pi a).
std::vector<cplx> bloch_coefficients(const AngleField& theta) {
  const Grid& g = theta.grid();
  std::vector<cplx> w(g.size());
  const auto r = theta.remainder().values();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::polar(1.0, r[k]);
  return forward_complex(g, std::move(w));
}

// Multiplies back the exp(i pi a.x) factor and splits into (d1, d2) parts.
VectorField2 bloch_to_director(const AngleField& theta, std::vector<cplx> coeffs) {
  const Grid& g = theta.grid();
  const std::vector<cplx> z = inverse_complex(g, std::move(coeffs));
  VectorField2 out(g);
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx v = z[static_cast<std::size_t>(i) * n + j] * std::polar(1.0, theta.background(g.coord(i), g.coord(j)));
      out.u1(i, j) = v.imag();
      out.u2(i, j) = v.real();
    }
  }
  return out;
}

double bloch_wavenumber(const Grid& g, int idx, int a, bool odd) {
  if (odd && idx == g.n() / 2) return 0.0;
  return g.wavenumber(idx) + kPi * a;
}

}  // namespace

VectorField2 director_laplacian(const AngleField& theta) {
  const Grid& g = theta.grid();
  const int n = g.n();
  std::vector<cplx> c = bloch_coefficients(theta);
  const Winding w = theta.winding();
  for (int i = 0; i < n; ++i) {
    const double k1 = bloch_wavenumber(g, i, w.a1, false);
    for (int j = 0; j < n; ++j) {
      const double k2 = bloch_wavenumber(g, j, w.a2, false);
      c[static_cast<std::size_t>(i) * n + j] *= -(k1 * k1 + k2 * k2);
    }
  }
  return bloch_to_director(theta, std::move(c));
}

DirectorGradient director_gradient(const AngleField& theta) {
  const Grid& g = theta.grid();
  const int n = g.n();
  const std::vector<cplx> c = bloch_coefficients(theta);
  const Winding w = theta.winding();
  auto along = [&](Axis axis) {
    std::vector<cplx> t = c;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double k = axis == Axis::x1 ? bloch_wavenumber(g, i, w.a1, true) : bloch_wavenumber(g, j, w.a2, true);
        t[static_cast<std::size_t>(i) * n + j] *= cplx(0.0, k);
      }
    }
    return bloch_to_director(theta, std::move(t));
  };
  return DirectorGradient{along(Axis::x1), along(Axis::x2)};
}

VectorField2 molecular_field(const AngleField& theta, const MaterialParams& p) {
  VectorField2 h = director_laplacian(theta);
  const ScalarField full = theta.full();
  const double h2 = p.h_squared();
  for (std::size_t k = 0; k < full.grid().size(); ++k) h.u1[k] += h2 * std::sin(full[k]);
  return h;
}

VelocityGradient velocity_gradient(const VectorField2& v) {
  const Spectrum s1 = forward(v.u1);
  const Spectrum s2 = forward(v.u2);
  auto d = [](Spectrum s, Axis axis) {
    differentiate(s, axis, 1);
    return inverse(std::move(s));
  };
  return VelocityGradient{d(s1, Axis::x1), d(s1, Axis::x2), d(s2, Axis::x1), d(s2, Axis::x2)};
}

RotationKernels rotation_kernels(const AngleField& theta, const VectorField2& v) {
  require_same_grid(theta.grid(), v.grid());
  const VelocityGradient G = velocity_gradient(v);
  const ScalarField full = theta.full();
  const Grid& g = theta.grid();
  RotationKernels out{ScalarField(g), ScalarField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = std::sin(full[k]);
    const double c = std::cos(full[k]);
    const double d[2] = {s, c};
    const double dp[2] = {c, -s};
    const double grad[2][2] = {{G.g11[k], G.g12[k]}, {G.g21[k], G.g22[k]}};
    double omega = 0.0;
    double strain = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double Om = 0.5 * (grad[i][j] - grad[j][i]);
        const double D = 0.5 * (grad[i][j] + grad[j][i]);
        omega += dp[i] * Om * d[j];
        strain += dp[i] * D * d[j];
      }
    }
    out.omega[k] = omega;
    out.strain[k] = strain;
  }
  return out;
}

}  // namespace els
