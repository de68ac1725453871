#include "els/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace els {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::ParodiViolation: return "ParodiViolation";
    case ErrorCode::NonPositiveGamma1: return "NonPositiveGamma1";
    case ErrorCode::DissipationViolation: return "DissipationViolation";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnresolvedField: return "UnresolvedField";
    case ErrorCode::NonUnitDirector: return "NonUnitDirector";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularLinearization: return "SingularLinearization";
    case ErrorCode::UnconvergedInput: return "UnconvergedInput";
    case ErrorCode::WindingMismatch: return "WindingMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonPositiveDistances: return "NonPositiveDistances";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Grid::Grid(int n) : n_(n) {
  if (n < 16 || n % 2 != 0)
    throw Error(ErrorCode::InvalidGrid, "grid size must be even and >= 16, got " + std::to_string(n));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b))
    throw Error(ErrorCode::GridMismatch,
                "fields live on different grids (" + std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
}

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::GridMismatch, "sample count does not match grid size");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator+=(double s) {
  for (double& x : values_) x += s;
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

double ScalarField::mean() const {
  double sum = 0.0;
  for (double x : values_) sum += x;
  return sum / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) sum += av[k] * bv[k];
  const double h = a.grid().spacing();
  return h * h * sum;
}

VectorField2::VectorField2(ScalarField a, ScalarField b) : u1(std::move(a)), u2(std::move(b)) {
  require_same_grid(u1.grid(), u2.grid());
}

double VectorField2::max_abs() const { return std::max(u1.max_abs(), u2.max_abs()); }
bool VectorField2::all_finite() const { return u1.all_finite() && u2.all_finite(); }

VectorField2& VectorField2::operator+=(const VectorField2& o) {
  u1 += o.u1;
  u2 += o.u2;
  return *this;
}

VectorField2& VectorField2::operator-=(const VectorField2& o) {
  u1 -= o.u1;
  u2 -= o.u2;
  return *this;
}

VectorField2& VectorField2::operator*=(double s) {
  u1 *= s;
  u2 *= s;
  return *this;
}

VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
VectorField2 operator*(double s, VectorField2 a) { return a *= s; }
double inner(const VectorField2& a, const VectorField2& b) { return inner(a.u1, b.u1) + inner(a.u2, b.u2); }

}  // namespace els
