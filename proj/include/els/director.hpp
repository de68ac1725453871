#pragma once

#include "els/field.hpp"
#include "els/material.hpp"

namespace els {

/// Integer winding pair (a1, a2): theta(x + e_i) = theta(x) + a_i * pi.
struct Winding {
  int a1 = 0;
  int a2 = 0;
  friend bool operator==(const Winding&, const Winding&) = default;
};

/// Director angle stored as a periodic remainder plus the harmonic background
/// pi * (a1 x1 + a2 x2).  The same type stores the doubled angle psi = 2 theta
/// of the steady problem, whose winding is then (2 a1, 2 a2).
class AngleField {
 public:
  AngleField(ScalarField remainder, Winding winding);
  static AngleField constant(const Grid& grid, double value, Winding winding = {});

  const Grid& grid() const noexcept { return remainder_.grid(); }
  const ScalarField& remainder() const noexcept { return remainder_; }
  ScalarField& remainder() noexcept { return remainder_; }
  Winding winding() const noexcept { return winding_; }

  double background(double x1, double x2) const noexcept {
    return kPi * (winding_.a1 * x1 + winding_.a2 * x2);
  }
  /// Full (non-periodic) angle at grid point (i, j).
  double at(int i, int j) const noexcept;
  ScalarField full() const;

  /// grad theta = grad(remainder) + pi * (a1, a2); periodic.
  VectorField2 gradient() const;
  /// Laplacian of the remainder; the background is harmonic.
  ScalarField laplacian() const;

  /// theta(x + w) for an arbitrary offset, remainder shifted spectrally.
  AngleField shifted(double w1, double w2) const;

  AngleField& operator+=(double c) {
    remainder_ += c;
    return *this;
  }

 private:
  ScalarField remainder_;
  Winding winding_;
};

/// d = (sin theta, cos theta).
struct DirectorField {
  ScalarField d1;
  ScalarField d2;

  const Grid& grid() const noexcept { return d1.grid(); }
  /// max_x | |d(x)| - 1 |.
  double unit_defect() const;
};

DirectorField angle_to_director(const AngleField& theta);

/// Lifts a resolved director field to a continuous angle by phase unwrapping
/// along grid lines.  The lift is pinned so theta(0) lies within pi of
/// `anchor` on the branch compatible with d(0).
AngleField director_to_angle(const DirectorField& d, double anchor);

/// Winding pair of a resolved director field.
Winding winding_numbers(const DirectorField& d);

/// Spectral Laplacian of d taken in the Bloch-shifted basis, exact for any
/// integer winding even though d itself is anti-periodic for odd a_i.
VectorField2 director_laplacian(const AngleField& theta);

/// Spectral gradient of d: returns (dd/dx1, dd/dx2), each a 2-vector field.
struct DirectorGradient {
  VectorField2 dx1;
  VectorField2 dx2;
};
DirectorGradient director_gradient(const AngleField& theta);

/// h = Laplacian(d) + (H . d) H with H = H (1,0)^T.
VectorField2 molecular_field(const AngleField& theta, const MaterialParams& p);

/// Pointwise Omega : d_perp (x) d and D : d_perp (x) d.
struct RotationKernels {
  ScalarField omega;
  ScalarField strain;
};
RotationKernels rotation_kernels(const AngleField& theta, const VectorField2& v);

/// Velocity gradient G_ij = d v_i / d x_j.
struct VelocityGradient {
  ScalarField g11, g12, g21, g22;
};
VelocityGradient velocity_gradient(const VectorField2& v);

}  // namespace els
