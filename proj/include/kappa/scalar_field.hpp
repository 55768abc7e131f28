#pragma once

#include <memory>
#include <optional>
#include <string>

#include "kappa/domain.hpp"
#include "kappa/point.hpp"
#include "kappa/profiles.hpp"

namespace kappa {

class FieldImpl {
 public:
  virtual ~FieldImpl() = default;
  virtual double eval(const Point& x) const = 0;
  virtual Vec grad(const Point& x) const = 0;
  virtual double laplacian(const Point& x) const = 0;
  /// Declared singular set: grad/laplacian throw SingularityError there.
  virtual bool singular_at(const Point&) const { return false; }
  virtual std::string describe() const = 0;
};

/// An analytic field R^n -> R with closed-form gradient and Laplacian.
/// Immutable, cheap to copy (shared implementation), safe across threads.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const FieldImpl> impl) : impl_(std::move(impl)) {}

  double eval(const Point& x) const { return impl().eval(x); }
  double operator()(const Point& x) const { return eval(x); }
  Vec grad(const Point& x) const;
  double laplacian(const Point& x) const;
  /// Carre du champ |grad|^2.
  double gamma(const Point& x) const { return norm2(grad(x)); }
  bool singular_at(const Point& x) const { return impl().singular_at(x); }
  std::string describe() const { return impl().describe(); }
  bool empty() const { return !impl_; }

  static ScalarField constant(double c);
  /// a . x + b
  static ScalarField affine(Vec a, double b);
  /// profile(x[axis])
  static ScalarField along_axis(Profile p, int axis);
  /// pa(x[axis_a]) * pb(x[axis_b])
  static ScalarField separable(Profile pa, int axis_a, Profile pb, int axis_b);
  /// profile(|x - center|); singular at the center unless the profile is even.
  static ScalarField radial(Profile p, Point center);
  /// coeff * log(|x - center| / scale)
  static ScalarField log_radial(Point center, double scale, double coeff = 1.0);
  /// Signed distance V of a domain.
  static ScalarField signed_distance(Domain domain);

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double s, const ScalarField& a);
  friend ScalarField operator+(const ScalarField& a, double c);
  friend ScalarField exp(const ScalarField& a);

  /// Value of a known constant field, if this field is one.
  std::optional<double> is_constant() const;

 private:
  const FieldImpl& impl() const;
  std::shared_ptr<const FieldImpl> impl_;
};

/// Lower bound for the curvature of the boundary of an explicit domain in
/// a Euclidean base space: +1/r for a ball, -1/r for a ball complement,
/// zero for flat faces. Nonzero base curvature is rejected: only the K = 0
/// instance is certified.
ScalarField boundary_curvature_bound(const Domain& domain, double base_curvature = 0.0);

}  // namespace kappa
