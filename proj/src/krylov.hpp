#pragma once

// Krylov solver shared by the steady Newton iteration and the BDF2 stepper.

#include <cmath>
#include <vector>

namespace els::detail {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

struct GmresResult {
  Vec x;
  double relative_residual;
};

// Restarted right-preconditioned GMRES with Givens rotations.
template <class Op, class Prec>
GmresResult gmres(const Op& A, const Prec& Minv, const Vec& b, double rtol, int m, int restarts) {
  const std::size_t N = b.size();
  Vec x(N, 0.0);
  const double bnorm = norm(b);
  if (bnorm == 0.0) return {x, 0.0};
  double rel = 1.0;
  for (int cycle = 0; cycle <= restarts; ++cycle) {
    Vec r = b;
    const Vec Ax = A(x);
    for (std::size_t k = 0; k < N; ++k) r[k] -= Ax[k];
    const double beta = norm(r);
    rel = beta / bnorm;
    if (rel <= rtol) break;

    std::vector<Vec> V{r};
    for (double& v : V[0]) v /= beta;
    std::vector<Vec> H(m + 1, Vec(m, 0.0));
    Vec cs(m, 0.0), sn(m, 0.0), e(m + 1, 0.0);
    e[0] = beta;
    int used = 0;
    for (int j = 0; j < m; ++j) {
      Vec w = A(Minv(V[j]));
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (std::size_t k = 0; k < N; ++k) w[k] -= H[i][j] * V[i][k];
      }
      H[j + 1][j] = norm(w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : H[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : H[j + 1][j] / denom;
      const double hnext = H[j + 1][j];
      H[j][j] = cs[j] * H[j][j] + sn[j] * hnext;
      H[j + 1][j] = 0.0;
      e[j + 1] = -sn[j] * e[j];
      e[j] = cs[j] * e[j];
      used = j + 1;
      rel = std::abs(e[j + 1]) / bnorm;
      if (rel <= rtol || hnext == 0.0) break;
      for (double& v : w) v /= hnext;
      V.push_back(std::move(w));
    }
    // Back substitution for the Krylov coefficients.
    Vec y(used, 0.0);
    for (int i = used - 1; i >= 0; --i) {
      double s = e[i];
      for (int k = i + 1; k < used; ++k) s -= H[i][k] * y[k];
      y[i] = H[i][i] == 0.0 ? 0.0 : s / H[i][i];
    }
    Vec u(N, 0.0);
    for (int i = 0; i < used; ++i)
      for (std::size_t k = 0; k < N; ++k) u[k] += y[i] * V[i][k];
    const Vec du = Minv(u);
    for (std::size_t k = 0; k < N; ++k) x[k] += du[k];
    if (rel <= rtol) break;
  }
  // Report the true residual rather than the recurrence estimate.
  Vec r = b;
  const Vec Ax = A(x);
  for (std::size_t k = 0; k < N; ++k) r[k] -= Ax[k];
  return {std::move(x), norm(r) / bnorm};
}

}  // namespace els::detail
