#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "kappa/domain.hpp"
#include "kappa/errors.hpp"
#include "kappa/report.hpp"
#include "kappa/scalar_field.hpp"

namespace kappa {

/// Curve gamma: [0,1] -> R^n sampled at uniformly spaced parameters.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Point> vertices);
  static Polyline segment(const Point& x, const Point& y, int vertices);

  const std::vector<Point>& vertices() const { return v_; }
  size_t size() const { return v_.size(); }
  const Point& operator[](size_t i) const { return v_[i]; }
  double euclidean_length() const;

 private:
  std::vector<Point> v_;
};

/// Trapezoid-in-the-exponent length sum_i exp((psi_i + psi_{i+1})/2) |v_{i+1} - v_i|
/// of a polyline in the conformal metric e^psi . d.
double conformal_length(const ScalarField& psi, const Polyline& curve);

struct GeodesicParams {
  int vertices = 65;
  int max_iterations = 20000;
  /// Stop when max_k |normal gradient at vertex k| / (local weight) <= tol.
  double grad_tol = 1e-8;
  std::optional<Polyline> initializer;
};

/// Raised when geodesic descent does not reach the gradient tolerance.
class GeodesicConvergenceError : public Error {
 public:
  GeodesicConvergenceError(const std::string& what, Polyline last, double residual)
      : Error(what), last_(std::move(last)), residual_(residual) {}
  const Polyline& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  Polyline last_;
  double residual_;
};

/// Local minimizer of conformal_length with fixed endpoints, by descent on
/// the discrete length functional from the straight segment (or the given
/// initializer). The returned length never exceeds the initializer's.
Polyline geodesic(const ScalarField& psi, const Point& x, const Point& y, const GeodesicParams& params = {});

double conformal_distance(const ScalarField& psi, const Point& x, const Point& y, const GeodesicParams& params = {});

/// Dimension data of a time change: N in [2, inf), N' in (N, inf].
struct CurvatureBoundSpec {
  ScalarField k;
  double N = 2.0;
  double N_prime = std::numeric_limits<double>::infinity();

  /// Coefficient c of Gamma(psi): (N-2)(N'-2)/(N'-N), or N-2 for N' = inf.
  double gamma_coefficient() const;
  /// N* = 2 + c.
  double n_star() const { return 2.0 + gamma_coefficient(); }
};

/// k'(x) = e^{-2 psi}[k - Delta psi - c Gamma(psi)].
double timechange_curvature(const CurvatureBoundSpec& spec, const ScalarField& psi, const Point& x);
/// Same bound in terms of phi = e^{-psi}: k phi^2 + 1/2 Delta phi^2 - (2 + c) Gamma(phi).
double timechange_curvature_phi(const CurvatureBoundSpec& spec, const ScalarField& phi, const Point& x);

/// psi = (eps - ell) V with V the signed distance of the domain.
ScalarField convexification_weight(const Domain& domain, const ScalarField& ell, double eps);

/// Boundary-near point pairs in Y used to probe local convexity.
struct PairSampler {
  int pairs = 16;
  /// Largest Euclidean distance between the two points of a pair.
  double max_separation = 0.0;  // 0: covering radius r/4 (ball types) or 0.25
  /// Largest depth of a point below the boundary (V >= -max_depth).
  double max_depth = 0.0;       // 0: max_separation / 8
  std::uint64_t seed = 1;
};

std::vector<std::pair<Point, Point>> sample_boundary_pairs(const Domain& domain, const PairSampler& sampler);

/// For every sampled pair computes the e^psi . d geodesic and records
/// max over its vertices of V^+. PASS iff all are <= tolerance
/// (0: 1e-3 r for ball types, 1e-3 otherwise).
Report check_local_convexity(const Domain& domain, const ScalarField& psi, const PairSampler& sampler,
                             double tolerance = 0.0, const GeodesicParams& params = {});

struct Trajectory {
  std::vector<double> t;
  std::vector<Point> x;
};

struct FlowOptions {
  double tol = 1e-11;        ///< local error tolerance of the step-doubling RK4
  double grad_bound = 1e8;   ///< |grad V| above this is treated as blow-up
};

/// x' = -grad V(x), sampled at multiples of dt up to T.
Trajectory evi_flow(const ScalarField& V, const Point& x0, double T, double dt, const FlowOptions& opts = {});

/// Both sides of d(x_t, y_t) <= exp(-int_0^t lbar(x_s, y_s) ds) d(x_0, y_0),
/// lbar(x, y) the average of ell along the segment [x, y].
struct ContractionTrace {
  std::vector<double> t, distance, bound;
  Trajectory x, y;
  double min_slack() const;
  double max_abs_gap() const;
};

ContractionTrace evi_contraction(const ScalarField& V, const ScalarField& ell, const Point& x0, const Point& y0,
                                 double T, double dt, const FlowOptions& opts = {});

/// Average of ell over the straight segment [x, y] (Gauss-Legendre).
double segment_average(const ScalarField& ell, const Point& x, const Point& y);

}  // namespace kappa
