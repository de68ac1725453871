#pragma once

#include <complex>
#include <vector>

#include "els/field.hpp"

namespace els {

using cplx = std::complex<double>;

/// Half-plane Fourier coefficients of a real field (FFTW r2c layout).
///
/// Index (i, j) with i in [0, n) along x1 and j in [0, n/2] along x2.
/// Coefficients are unnormalized: a pure mode cos(2*pi*m*x1) has |c| = n^2/2.
class Spectrum {
 public:
  explicit Spectrum(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int columns() const noexcept { return grid_.n() / 2 + 1; }
  cplx& operator()(int i, int j) noexcept { return c_[static_cast<std::size_t>(i) * columns() + j]; }
  cplx operator()(int i, int j) const noexcept { return c_[static_cast<std::size_t>(i) * columns() + j]; }
  cplx* data() noexcept { return c_.data(); }
  const cplx* data() const noexcept { return c_.data(); }
  std::size_t size() const noexcept { return c_.size(); }

  /// Multiplicity of column j in the full Hermitian spectrum (1 or 2).
  double weight(int j) const noexcept { return (j == 0 || j == grid_.n() / 2) ? 1.0 : 2.0; }

  Spectrum& operator+=(const Spectrum& o);
  Spectrum& operator*=(double s);

 private:
  Grid grid_;
  std::vector<cplx> c_;
};

Spectrum forward(const ScalarField& f);
ScalarField inverse(Spectrum s);

/// Full complex 2D transforms for complex-valued samples (row-major, n x n).
std::vector<cplx> forward_complex(const Grid& grid, std::vector<cplx> values);
std::vector<cplx> inverse_complex(const Grid& grid, std::vector<cplx> coeffs);

/// Effective wavenumber for first derivatives: the Nyquist mode is zeroed.
double odd_wavenumber(const Grid& grid, int idx) noexcept;

/// True when both signed modes satisfy |m| <= n/3.
bool in_dealias_band(const Grid& grid, int i, int j) noexcept;

// In-place operators on a spectrum.
void differentiate(Spectrum& s, Axis axis, int order);
void apply_laplacian(Spectrum& s);
void apply_dealias(Spectrum& s);
/// Leray projection of a velocity given by its two component spectra.
void project(Spectrum& a, Spectrum& b);

// Physical-space operations; each transforms on demand.
ScalarField derivative(const ScalarField& f, Axis axis, int order);
ScalarField laplacian(const ScalarField& f);
ScalarField inverse_laplacian_zero_mean(const ScalarField& f);
ScalarField dealias(const ScalarField& f);
ScalarField divergence(const VectorField2& u);
VectorField2 gradient(const ScalarField& f);
VectorField2 leray_project(const VectorField2& u);

/// Sobolev norm with multi-index derivatives sum_{|alpha|<=order} ||D^alpha f||^2.
double sobolev_norm(const ScalarField& f, int order);
double sobolev_norm(const VectorField2& u, int order);

/// Translates a periodic field by an arbitrary offset w (f(x) -> f(x + w)),
/// exact for band-limited data.
ScalarField spectral_shift(const ScalarField& f, double w1, double w2);

}  // namespace els
