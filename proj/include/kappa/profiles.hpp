#pragma once

#include <memory>
#include <string>
#include <vector>

namespace kappa {

/// Value and first two derivatives of a function of one variable.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class ProfileImpl {
 public:
  virtual ~ProfileImpl() = default;
  virtual Jet jet(double t) const = 0;
  /// True if the profile is even, so a radial field built from it is
  /// smooth at the center.
  virtual bool even() const { return false; }
  /// Points where the profile (or its derivatives) are undefined.
  virtual bool singular_at(double) const { return false; }
  virtual std::string describe() const = 0;
};

/// Immutable handle to a one-variable function with closed-form first and
/// second derivatives. Building block for axis-aligned, separable and
/// radial scalar fields.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::shared_ptr<const ProfileImpl> impl) : impl_(std::move(impl)) {}

  Jet jet(double t) const;
  double operator()(double t) const { return jet(t).value; }
  bool even() const { return impl_->even(); }
  std::string describe() const { return impl_->describe(); }

  /// sum_k c_k t^k
  static Profile polynomial(std::vector<double> coeffs);
  /// amp * cos(freq * t + phase)
  static Profile cosine(double amp, double freq, double phase = 0.0);
  /// amp * sin(freq * t + phase)
  static Profile sine(double amp, double freq, double phase = 0.0);
  /// coeff * log(t / scale), t > 0
  static Profile log(double coeff, double scale);
  /// cos^2(pi t) on |t| <= 1/2, zero outside.
  static Profile cos2_bump();
  /// (1 - 4 t^2)^3 on |t| <= 1/2, zero outside.
  static Profile poly_bump();
  /// (t^2 - 1)^3 t on [-1, 1], zero outside.
  static Profile cantor_eta();
  /// p((t - center) / width)
  static Profile rescaled(Profile p, double center, double width);
  /// Finite mid-third Cantor sum Phi_j built from a bump supported in
  /// (-1/2, 1/2): sum over levels n <= j and the 2^(n-1) removed
  /// intervals of 3^-n bump(3^n (t - center)).
  static Profile cantor(int levels, Profile bump);

 private:
  std::shared_ptr<const ProfileImpl> impl_;
};

}  // namespace kappa
