#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kappa/point.hpp"

namespace kappa {

enum class DomainKind { Interval, Box, Ball, BallComplement, HalfSpace };

/// Result of projecting a point onto Y (one Skorokhod step).
struct Reflection {
  Point point;
  double push = 0.0;           ///< V(x)^+, the distance travelled by the projection
  std::optional<Vec> normal;   ///< inward unit normal at the projection, when push > 0
};

/// A closed subset Y of R^n with closed-form signed distance
/// V = d(., Y) - d(., R^n \ Y): negative inside, zero on the boundary,
/// positive outside.
///
/// Immutable after construction.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain box(Point lo, Point hi);
  static Domain ball(Point center, double radius);
  static Domain ball_complement(Point center, double radius);
  /// Y = { x : x[axis] >= level } in R^dim.
  static Domain half_space(int dim, int axis, double level);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }
  int axis() const { return axis_; }
  double level() const { return level_; }
  std::string name() const;

  double signed_distance(const Point& x) const;
  /// Gradient of V; throws SingularityError on the skeleton (ball center,
  /// medial set of a box).
  Vec grad_signed_distance(const Point& x) const;
  double laplacian_signed_distance(const Point& x) const;
  bool singular_at(const Point& x) const;

  bool contains(const Point& x) const { return signed_distance(x) <= 0.0; }
  Reflection reflect_into(const Point& x) const;

  /// Closed-form (n-1)-dimensional measure of the boundary, infinite for
  /// unbounded boundaries.
  double boundary_measure() const;
  double volume() const;

 private:
  Domain(DomainKind kind, int dim) : kind_(kind), dim_(dim) {}
  void check_dim(const Point& x) const;

  DomainKind kind_;
  int dim_;
  Point center_;
  double radius_ = 0.0;
  Point lo_, hi_;
  int axis_ = 0;
  double level_ = 0.0;
};

double signed_distance(const Domain& domain, const Point& x);
Reflection reflect_into(const Domain& domain, const Point& x);

/// The comparison cotangent: 1/r for K = 0, sqrt(K) cot(sqrt(K) r) for
/// K > 0, sqrt(-K) coth(sqrt(-K) r) for K < 0.
double cot_k(double K, double r);

/// Comparison potential V_{r,z} evaluated at x for base curvature K.
/// Positive inside B_r(z), zero on the sphere, negative outside.
double comparison_potential(double r, const Point& z, double K, const Point& x);

}  // namespace kappa
