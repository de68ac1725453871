#include "els/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace els {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c_forward = nullptr;
  fftw_plan c2c_backward = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double* real = fftw_alloc_real(nn);
  fftw_complex* half = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
  fftw_complex* a = fftw_alloc_complex(nn);
  fftw_complex* b = fftw_alloc_complex(nn);
  Plans p;
  p.r2c = fftw_plan_dft_r2c_2d(n, n, real, half, flags);
  p.c2r = fftw_plan_dft_c2r_2d(n, n, half, real, flags);
  p.c2c_forward = fftw_plan_dft_2d(n, n, a, b, FFTW_FORWARD, flags);
  p.c2c_backward = fftw_plan_dft_2d(n, n, a, b, FFTW_BACKWARD, flags);
  fftw_free(real);
  fftw_free(half);
  fftw_free(a);
  fftw_free(b);
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Spectrum::Spectrum(const Grid& grid)
    : grid_(grid), c_(static_cast<std::size_t>(grid.n()) * (grid.n() / 2 + 1)) {}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Spectrum& Spectrum::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

Spectrum forward(const ScalarField& f) {
  Spectrum s(f.grid());
  fftw_execute_dft_r2c(plans_for(f.grid().n()).r2c, const_cast<double*>(f.data()), as_fftw(s.data()));
  return s;
}

ScalarField inverse(Spectrum s) {
  const Grid& g = s.grid();
  ScalarField out(g);
  fftw_execute_dft_c2r(plans_for(g.n()).c2r, as_fftw(s.data()), out.data());
  out *= 1.0 / static_cast<double>(g.size());
  return out;
}

std::vector<cplx> forward_complex(const Grid& grid, std::vector<cplx> values) {
  if (values.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "complex sample count mismatch");
  std::vector<cplx> out(values.size());
  fftw_execute_dft(plans_for(grid.n()).c2c_forward, as_fftw(values.data()), as_fftw(out.data()));
  return out;
}

std::vector<cplx> inverse_complex(const Grid& grid, std::vector<cplx> coeffs) {
  if (coeffs.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "complex coefficient count mismatch");
  std::vector<cplx> out(coeffs.size());
  fftw_execute_dft(plans_for(grid.n()).c2c_backward, as_fftw(coeffs.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out) c *= scale;
  return out;
}

double odd_wavenumber(const Grid& grid, int idx) noexcept {
  return idx == grid.n() / 2 ? 0.0 : grid.wavenumber(idx);
}

bool in_dealias_band(const Grid& grid, int i, int j) noexcept {
  const int n = grid.n();
  return 3 * std::abs(grid.mode(i)) <= n && 3 * std::abs(grid.mode(j)) <= n;
}

void differentiate(Spectrum& s, Axis axis, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::UnsupportedOrder, "derivative order must be 1 or 2");
  const Grid& g = s.grid();
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < s.columns(); ++j) {
      const int idx = axis == Axis::x1 ? i : j;
      if (order == 1) {
        s(i, j) *= cplx(0.0, odd_wavenumber(g, idx));
      } else {
        const double k = g.wavenumber(idx);
        s(i, j) *= -k * k;
      }
    }
  }
}

void apply_laplacian(Spectrum& s) {
  const Grid& g = s.grid();
  for (int i = 0; i < g.n(); ++i) {
    const double k1 = g.wavenumber(i);
    for (int j = 0; j < s.columns(); ++j) {
      const double k2 = g.wavenumber(j);
      s(i, j) *= -(k1 * k1 + k2 * k2);
    }
  }
}

void apply_dealias(Spectrum& s) {
  const Grid& g = s.grid();
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < s.columns(); ++j)
      if (!in_dealias_band(g, i, j)) s(i, j) = 0.0;
}

ScalarField derivative(const ScalarField& f, Axis axis, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::UnsupportedOrder, "derivative order must be 1 or 2");
  Spectrum s = forward(f);
  differentiate(s, axis, order);
  return inverse(std::move(s));
}

ScalarField laplacian(const ScalarField& f) {
  Spectrum s = forward(f);
  apply_laplacian(s);
  return inverse(std::move(s));
}

ScalarField inverse_laplacian_zero_mean(const ScalarField& f) {
  Spectrum s = forward(f);
  const Grid& g = s.grid();
  for (int i = 0; i < g.n(); ++i) {
    const double k1 = g.wavenumber(i);
    for (int j = 0; j < s.columns(); ++j) {
      const double k2 = g.wavenumber(j);
      const double k2sum = k1 * k1 + k2 * k2;
      s(i, j) = k2sum == 0.0 ? cplx(0.0) : s(i, j) / -k2sum;
    }
  }
  return inverse(std::move(s));
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s = forward(f);
  apply_dealias(s);
  return inverse(std::move(s));
}

ScalarField divergence(const VectorField2& u) {
  Spectrum a = forward(u.u1);
  Spectrum b = forward(u.u2);
  differentiate(a, Axis::x1, 1);
  differentiate(b, Axis::x2, 1);
  a += b;
  return inverse(std::move(a));
}

VectorField2 gradient(const ScalarField& f) {
  const Spectrum s = forward(f);
  Spectrum a = s;
  Spectrum b = s;
  differentiate(a, Axis::x1, 1);
  differentiate(b, Axis::x2, 1);
  return VectorField2(inverse(std::move(a)), inverse(std::move(b)));
}

void project(Spectrum& a, Spectrum& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  // Projector built from the same Nyquist-free wavenumbers the divergence
  // uses, so the projected field is exactly divergence-free in that sense.
  for (int i = 0; i < g.n(); ++i) {
    const double k1 = odd_wavenumber(g, i);
    for (int j = 0; j < a.columns(); ++j) {
      const double k2 = odd_wavenumber(g, j);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) continue;
      const cplx kdotu = (k1 * a(i, j) + k2 * b(i, j)) / kk;
      a(i, j) -= k1 * kdotu;
      b(i, j) -= k2 * kdotu;
    }
  }
}

VectorField2 leray_project(const VectorField2& u) {
  Spectrum a = forward(u.u1);
  Spectrum b = forward(u.u2);
  project(a, b);
  return VectorField2(inverse(std::move(a)), inverse(std::move(b)));
}

double sobolev_norm(const ScalarField& f, int order) {
  if (order < 0 || order > 2) throw Error(ErrorCode::UnsupportedOrder, "Sobolev order must be 0, 1 or 2");
  double sum = inner(f, f);
  if (order >= 1) {
    const Spectrum s = forward(f);
    auto term = [&](auto&& op) {
      Spectrum t = s;
      op(t);
      const ScalarField d = inverse(std::move(t));
      sum += inner(d, d);
    };
    term([](Spectrum& t) { differentiate(t, Axis::x1, 1); });
    term([](Spectrum& t) { differentiate(t, Axis::x2, 1); });
    if (order == 2) {
      term([](Spectrum& t) { differentiate(t, Axis::x1, 2); });
      term([](Spectrum& t) {
        differentiate(t, Axis::x1, 1);
        differentiate(t, Axis::x2, 1);
      });
      term([](Spectrum& t) { differentiate(t, Axis::x2, 2); });
    }
  }
  return std::sqrt(sum);
}

double sobolev_norm(const VectorField2& u, int order) {
  const double a = sobolev_norm(u.u1, order);
  const double b = sobolev_norm(u.u2, order);
  return std::sqrt(a * a + b * b);
}

ScalarField spectral_shift(const ScalarField& f, double w1, double w2) {
  Spectrum s = forward(f);
  const Grid& g = s.grid();
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < s.columns(); ++j) {
      if (i == n / 2 || j == n / 2) {
        s(i, j) = 0.0;
        continue;
      }
      const double phase = g.wavenumber(i) * w1 + g.wavenumber(j) * w2;
      s(i, j) *= cplx(std::cos(phase), std::sin(phase));
    }
  }
  return inverse(std::move(s));
}

}  // namespace els
