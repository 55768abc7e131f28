#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "kappa/conformal.hpp"

namespace kappa {
namespace {

using State = std::vector<double>;
using Rhs = std::function<State(const State&)>;

State axpy(const State& y, double a, const State& k) {
  State out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

State rk4_step(const Rhs& f, const State& y, double h) {
  const State k1 = f(y);
  const State k2 = f(axpy(y, 0.5 * h, k1));
  const State k3 = f(axpy(y, 0.5 * h, k2));
  const State k4 = f(axpy(y, h, k3));
  State out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Advances y over [0, span] with step doubling and local extrapolation.
State advance(const Rhs& f, State y, double span, double tol, double& h) {
  double done = 0.0;
  h = std::min(h, span);
  while (done < span) {
    const double step = std::min(h, span - done);
    const State big = rk4_step(f, y, step);
    const State half = rk4_step(f, rk4_step(f, y, 0.5 * step), 0.5 * step);
    double err = 0.0, scale = 1.0;
    for (size_t i = 0; i < y.size(); ++i) {
      err = std::max(err, std::abs(half[i] - big[i]) / 15.0);
      scale = std::max(scale, std::abs(half[i]));
    }
    if (err > tol * scale && step > 1e-14 * span) {
      h = 0.5 * step;
      continue;
    }
    for (size_t i = 0; i < y.size(); ++i) y[i] = half[i] + (half[i] - big[i]) / 15.0;
    done += step;
    if (err < 0.01 * tol * scale) h = 2.0 * step;
  }
  return y;
}

State to_state(const Point& p) {
  State s(static_cast<size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) s[i] = p[i];
  return s;
}

Point to_point(const State& s, size_t offset, int dim) {
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = s[offset + static_cast<size_t>(i)];
  return p;
}

Vec checked_grad(const ScalarField& V, const Point& x, const FlowOptions& opts) {
  const Vec g = V.grad(x);
  if (!g.finite() || norm(g) > opts.grad_bound)
    throw DivergenceError("gradient flow blew up at " + x.str());
  return g;
}

void check_times(double T, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("flow step dt must be positive");
  if (!(T >= 0.0)) throw InvalidParameter("flow horizon must be nonnegative");
}

}  // namespace

double segment_average(const ScalarField& ell, const Point& x, const Point& y) {
  // 5-point Gauss-Legendre on [0, 1].
  static constexpr std::array<double, 5> nodes = {0.04691007703066800, 0.23076534494715845, 0.5,
                                                  0.76923465505284155, 0.95308992296933200};
  static constexpr std::array<double, 5> weights = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                                    0.23931433524968324, 0.11846344252809454};
  double s = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * ell.eval((1.0 - nodes[i]) * x + nodes[i] * y);
  return s;
}

Trajectory evi_flow(const ScalarField& V, const Point& x0, double T, double dt, const FlowOptions& opts) {
  check_times(T, dt);
  const int n = x0.dim();
  const Rhs f = [&](const State& s) {
    const Vec g = checked_grad(V, to_point(s, 0, n), opts);
    State out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = -g[i];
    return out;
  };
  Trajectory tr;
  State y = to_state(x0);
  tr.t.push_back(0.0);
  tr.x.push_back(x0);
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  double h = dt;
  for (long k = 1; k <= steps; ++k) {
    const double t1 = std::min(T, k * dt);
    y = advance(f, y, t1 - tr.t.back(), opts.tol, h);
    tr.t.push_back(t1);
    tr.x.push_back(to_point(y, 0, n));
  }
  return tr;
}

ContractionTrace evi_contraction(const ScalarField& V, const ScalarField& ell, const Point& x0, const Point& y0,
                                 double T, double dt, const FlowOptions& opts) {
  check_times(T, dt);
  if (x0.dim() != y0.dim()) throw InvalidParameter("flow start points differ in dimension");
  const int n = x0.dim();
  const auto un = static_cast<size_t>(n);
  // State: x, y, and the running integral of lbar(x_s, y_s).
  const Rhs f = [&](const State& s) {
    const Point x = to_point(s, 0, n), y = to_point(s, un, n);
    const Vec gx = checked_grad(V, x, opts), gy = checked_grad(V, y, opts);
    State out(2 * un + 1);
    for (int i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] = -gx[i];
      out[un + static_cast<size_t>(i)] = -gy[i];
    }
    out[2 * un] = segment_average(ell, x, y);
    return out;
  };
  State s(2 * un + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    s[static_cast<size_t>(i)] = x0[i];
    s[un + static_cast<size_t>(i)] = y0[i];
  }
  const double d0 = distance(x0, y0);
  ContractionTrace tr;
  auto record = [&](double t) {
    const Point x = to_point(s, 0, n), y = to_point(s, un, n);
    tr.t.push_back(t);
    tr.x.t.push_back(t);
    tr.y.t.push_back(t);
    tr.x.x.push_back(x);
    tr.y.x.push_back(y);
    tr.distance.push_back(distance(x, y));
    tr.bound.push_back(std::exp(-s[2 * un]) * d0);
  };
  record(0.0);
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  double h = dt;
  for (long k = 1; k <= steps; ++k) {
    const double t1 = std::min(T, k * dt);
    s = advance(f, s, t1 - tr.t.back(), opts.tol, h);
    record(t1);
  }
  return tr;
}

double ContractionTrace::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < t.size(); ++i) m = std::min(m, bound[i] - distance[i]);
  return m;
}

double ContractionTrace::max_abs_gap() const {
  double m = 0.0;
  for (size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(bound[i] - distance[i]));
  return m;
}

}  // namespace kappa
