#include <algorithm>
#include <cmath>
#include <vector>

#include "kappa/conformal.hpp"

namespace kappa {
namespace {

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place
// (Thomas algorithm). off[k] couples unknowns k and k+1.
void solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, std::vector<double>& rhs) {
  const size_t n = diag.size();
  std::vector<double> c(n), d(n);
  c[0] = off.empty() ? 0.0 : off[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (size_t k = 1; k < n; ++k) {
    const double m = diag[k] - off[k - 1] * c[k - 1];
    c[k] = k + 1 < n ? off[k] / m : 0.0;
    d[k] = (rhs[k] - off[k - 1] * d[k - 1]) / m;
  }
  rhs[n - 1] = d[n - 1];
  for (size_t k = n - 1; k-- > 0;) rhs[k] = d[k] - c[k] * rhs[k + 1];
}

struct Descent {
  const ScalarField& psi;
  std::vector<Point> v;
  std::vector<double> psi_v;
  double length = 0.0;

  double evaluate(const std::vector<Point>& pts, std::vector<double>& values) const {
    values.resize(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) values[i] = psi.eval(pts[i]);
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
      total += std::exp(0.5 * (values[i] + values[i + 1])) * distance(pts[i], pts[i + 1]);
    return total;
  }
};

}  // namespace

Polyline geodesic(const ScalarField& psi, const Point& x, const Point& y, const GeodesicParams& params) {
  if (x == y) throw InvalidParameter("geodesic endpoints must differ");
  Polyline init = params.initializer ? *params.initializer : Polyline::segment(x, y, params.vertices);
  if (!(init[0] == x) || !(init[init.size() - 1] == y))
    throw InvalidParameter("initializer endpoints do not match");

  Descent D{psi, init.vertices(), {}, 0.0};
  D.length = D.evaluate(D.v, D.psi_v);
  const size_t M = D.v.size();
  if (M < 3) return init;
  const size_t interior = M - 2;
  const int n = x.dim();

  std::vector<Vec> normal_grad(interior, Vec(n));
  std::vector<Vec> tangent(interior, Vec(n));
  std::vector<double> diag(interior), off(interior > 1 ? interior - 1 : 0), rhs(interior);
  std::vector<Point> trial;
  std::vector<double> trial_psi;
  double residual = 0.0;

  for (int it = 0; it <= params.max_iterations; ++it) {
    // Segment weights and lengths.
    std::vector<double> w(M - 1), len(M - 1);
    for (size_t i = 0; i + 1 < M; ++i) {
      w[i] = std::exp(0.5 * (D.psi_v[i] + D.psi_v[i + 1]));
      len[i] = distance(D.v[i], D.v[i + 1]);
    }
    residual = 0.0;
    for (size_t k = 1; k + 1 < M; ++k) {
      const Vec gpsi = psi.grad(D.v[k]);
      const Vec e0 = (D.v[k] - D.v[k - 1]) / len[k - 1];
      const Vec e1 = (D.v[k + 1] - D.v[k]) / len[k];
      Vec g = w[k - 1] * e0 - w[k] * e1 + (0.5 * (w[k - 1] * len[k - 1] + w[k] * len[k])) * gpsi;
      Vec t = D.v[k + 1] - D.v[k - 1];
      t = t / norm(t);
      g = g - dot(g, t) * t;
      normal_grad[k - 1] = g;
      tangent[k - 1] = t;
      residual = std::max(residual, norm(g) / (0.5 * (w[k - 1] + w[k])));
    }
    if (residual <= params.grad_tol) return Polyline(D.v);
    if (it == params.max_iterations) break;

    // Newton-like step: the stiff part of the Hessian is the weighted
    // second difference along the curve.
    for (size_t k = 1; k + 1 < M; ++k) {
      diag[k - 1] = w[k - 1] / len[k - 1] + w[k] / len[k];
      if (k + 2 < M) off[k - 1] = -w[k] / len[k];
    }
    std::vector<Vec> step(interior, Vec(n));
    for (int c = 0; c < n; ++c) {
      for (size_t k = 0; k < interior; ++k) rhs[k] = normal_grad[k][c];
      solve_tridiagonal(diag, off, rhs);
      for (size_t k = 0; k < interior; ++k) step[k][c] = rhs[k];
    }
    for (size_t k = 0; k < interior; ++k) step[k] = step[k] - dot(step[k], tangent[k]) * tangent[k];

    double s = 1.0;
    bool accepted = false;
    while (s > 1e-12) {
      trial = D.v;
      for (size_t k = 1; k + 1 < M; ++k) trial[k] = D.v[k] - s * step[k - 1];
      bool distinct = true;
      for (size_t i = 0; i + 1 < M; ++i)
        if (trial[i] == trial[i + 1]) distinct = false;
      if (distinct) {
        const double L = D.evaluate(trial, trial_psi);
        if (L <= D.length) {
          D.v.swap(trial);
          D.psi_v.swap(trial_psi);
          D.length = L;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    // No decrease is representable any more: round-off floor.
    if (!accepted) {
      if (residual <= 1e4 * params.grad_tol) return Polyline(D.v);
      break;
    }
  }
  throw GeodesicConvergenceError("geodesic descent did not converge (residual " + std::to_string(residual) + ")",
                                 Polyline(D.v), residual);
}

}  // namespace kappa
