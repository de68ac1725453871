#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "els/error.hpp"

namespace els {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Axis { x1 = 1, x2 = 2 };

/// Uniform n x n periodic grid on the unit square [0,1)^2.
///
/// Point (i, j) sits at (i*h, j*h); i runs along x1 and j along x2.  Fourier
/// modes are the signed integers m in [-n/2, n/2) with wavenumber 2*pi*m.
class Grid {
 public:
  explicit Grid(int n);

  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double coord(int i) const noexcept { return i * spacing(); }

  /// Signed mode for an FFT index in [0, n).
  int mode(int idx) const noexcept { return idx < n_ / 2 ? idx : idx - n_; }
  double wavenumber(int idx) const noexcept { return kTwoPi * mode(idx); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
};

void require_same_grid(const Grid& a, const Grid& b);

/// Real samples on a Grid, row-major with the x1 index outermost.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    ScalarField out(grid);
    const int n = grid.n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = f(grid.coord(i), grid.coord(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator()(int i, int j) noexcept { return values_[static_cast<std::size_t>(i) * grid_.n() + j]; }
  double operator()(int i, int j) const noexcept {
    return values_[static_cast<std::size_t>(i) * grid_.n() + j];
  }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator+=(double s);
  ScalarField& operator*=(double s);

  /// Applies f to every sample in place.
  template <class F>
  ScalarField& apply(F&& f) {
    for (double& x : values_) x = f(x);
    return *this;
  }

  double mean() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

template <class F>
ScalarField map(ScalarField a, F&& f) {
  a.apply(std::forward<F>(f));
  return a;
}

/// L2 inner product by the periodic trapezoid rule h^2 * sum(a*b).
double inner(const ScalarField& a, const ScalarField& b);

/// Two components on a shared grid.
struct VectorField2 {
  ScalarField u1;
  ScalarField u2;

  explicit VectorField2(const Grid& grid) : u1(grid), u2(grid) {}
  VectorField2(ScalarField a, ScalarField b);

  const Grid& grid() const noexcept { return u1.grid(); }
  double max_abs() const;
  bool all_finite() const;

  VectorField2& operator+=(const VectorField2& o);
  VectorField2& operator-=(const VectorField2& o);
  VectorField2& operator*=(double s);
};

VectorField2 operator+(VectorField2 a, const VectorField2& b);
VectorField2 operator-(VectorField2 a, const VectorField2& b);
VectorField2 operator*(double s, VectorField2 a);
double inner(const VectorField2& a, const VectorField2& b);

}  // namespace els
