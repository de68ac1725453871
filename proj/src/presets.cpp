#include "els/presets.hpp"

#include <cmath>

#include "els/io.hpp"
#include "els/spectral.hpp"
#include "els/steady.hpp"

namespace els {

double portable_uniform(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

ScalarField band_limited_noise(const Grid& grid, std::mt19937_64& rng, double amplitude, int max_mode) {
  ScalarField f(grid);
  for (int m1 = -max_mode; m1 <= max_mode; ++m1) {
    for (int m2 = 0; m2 <= max_mode; ++m2) {
      if (m2 == 0 && m1 <= 0) continue;  // one of each +-m pair, no mean
      const double a = portable_uniform(rng);
      const double b = portable_uniform(rng);
      for (int i = 0; i < grid.n(); ++i) {
        for (int j = 0; j < grid.n(); ++j) {
          const double phase = kTwoPi * (m1 * grid.coord(i) + m2 * grid.coord(j));
          f(i, j) += a * std::cos(phase) + b * std::sin(phase);
        }
      }
    }
  }
  const double peak = f.max_abs();
  if (peak > 0.0) f *= amplitude / peak;
  return f;
}

VectorField2 solenoidal_noise(const Grid& grid, std::mt19937_64& rng, double amplitude, int max_mode) {
  const ScalarField stream = band_limited_noise(grid, rng, 1.0, max_mode);
  VectorField2 v(derivative(stream, Axis::x2, 1), -derivative(stream, Axis::x1, 1));
  const double peak = v.max_abs();
  if (peak > 0.0) v *= amplitude / peak;
  return v;
}

namespace {

// A steady director of the configured winding to perturb around.
AngleField steady_base(const Grid& g, const MaterialParams& p, Winding w) {
  AngleField aligned = AngleField::constant(g, kPi / 2.0, w);
  if ((w.a1 == 0 && w.a2 == 0) || p.h_field == 0.0) return aligned;
  const SteadyProblem prob{g, p.h_field, w};
  const SteadySolution sol = solve_gradient_flow(prob, psi_from_theta(aligned), 1e-11, 1e3);
  if (!sol.converged) throw Error(ErrorCode::NotConverged, "could not build the steady base state");
  return sol.theta();
}

}  // namespace

SimState make_initial_state(const RunConfig& c, const MaterialParams& p) {
  const Grid g(c.n);
  const std::string& preset = c.initial.preset;
  if (preset == "snapshot") {
    SimState s = state_of(read_snapshot(c.initial.snapshot));
    if (s.grid().n() != c.n) throw Error(ErrorCode::GridMismatch, "snapshot grid differs from grid.n");
    if (!(s.theta.winding() == c.winding)) throw Error(ErrorCode::WindingMismatch, "snapshot winding differs");
    s.t = 0.0;
    return s;
  }
  if (preset == "aligned") return SimState{VectorField2(g), AngleField::constant(g, kPi / 2.0, c.winding), 0.0};
  if (preset == "winding_linear") return SimState{VectorField2(g), AngleField::constant(g, 0.0, c.winding), 0.0};
  if (preset == "taylor_green") {
    const double a = c.initial.velocity_amplitude > 0.0 ? c.initial.velocity_amplitude : 1.0;
    VectorField2 v(ScalarField::sample(g, [a](double x, double y) { return a * std::sin(kTwoPi * x) * std::cos(kTwoPi * y); }),
                   ScalarField::sample(g, [a](double x, double y) { return -a * std::cos(kTwoPi * x) * std::sin(kTwoPi * y); }));
    return SimState{std::move(v), AngleField::constant(g, kPi / 2.0, c.winding), 0.0};
  }
  if (preset == "steady_plus_noise") {
    std::mt19937_64 rng(c.initial.seed);
    AngleField theta = steady_base(g, p, c.winding);
    theta.remainder() += band_limited_noise(g, rng, c.initial.amplitude);
    VectorField2 v = c.initial.velocity_amplitude > 0.0 ? solenoidal_noise(g, rng, c.initial.velocity_amplitude)
                                                        : VectorField2(g);
    return SimState{std::move(v), std::move(theta), 0.0};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown preset " + preset);
}

}  // namespace els
