#include "kappa/profiles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kappa/errors.hpp"

namespace kappa {
namespace {

using std::numbers::pi;

class Polynomial final : public ProfileImpl {
 public:
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) {}
  Jet jet(double t) const override {
    Jet j;
    // Horner for value and both derivatives.
    for (size_t k = c_.size(); k-- > 0;) {
      j.d2 = j.d2 * t + 2.0 * j.d1;
      j.d1 = j.d1 * t + j.value;
      j.value = j.value * t + c_[k];
    }
    return j;
  }
  bool even() const override {
    for (size_t k = 1; k < c_.size(); k += 2)
      if (c_[k] != 0.0) return false;
    return true;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "poly[";
    for (size_t k = 0; k < c_.size(); ++k) os << (k ? "," : "") << c_[k];
    os << "]";
    return os.str();
  }

 private:
  std::vector<double> c_;
};

class Trig final : public ProfileImpl {
 public:
  Trig(double amp, double freq, double phase, bool sine) : amp_(amp), freq_(freq), phase_(phase), sine_(sine) {}
  Jet jet(double t) const override {
    const double a = freq_ * t + phase_;
    const double c = std::cos(a), s = std::sin(a);
    if (sine_) return {amp_ * s, amp_ * freq_ * c, -amp_ * freq_ * freq_ * s};
    return {amp_ * c, -amp_ * freq_ * s, -amp_ * freq_ * freq_ * c};
  }
  bool even() const override { return !sine_ && phase_ == 0.0; }
  std::string describe() const override {
    std::ostringstream os;
    os << amp_ << (sine_ ? "*sin(" : "*cos(") << freq_ << "t+" << phase_ << ")";
    return os.str();
  }

 private:
  double amp_, freq_, phase_;
  bool sine_;
};

class Log final : public ProfileImpl {
 public:
  Log(double coeff, double scale) : coeff_(coeff), scale_(scale) {}
  Jet jet(double t) const override {
    if (!(t > 0.0)) throw SingularityError("log profile requires t > 0");
    return {coeff_ * std::log(t / scale_), coeff_ / t, -coeff_ / (t * t)};
  }
  bool singular_at(double t) const override { return !(t > 0.0); }
  std::string describe() const override {
    std::ostringstream os;
    os << coeff_ << "*log(t/" << scale_ << ")";
    return os.str();
  }

 private:
  double coeff_, scale_;
};

class Cos2Bump final : public ProfileImpl {
 public:
  Jet jet(double t) const override {
    if (std::abs(t) >= 0.5) return {};
    const double c = std::cos(pi * t), s = std::sin(pi * t);
    return {c * c, -2.0 * pi * c * s, -2.0 * pi * pi * std::cos(2.0 * pi * t)};
  }
  bool even() const override { return true; }
  std::string describe() const override { return "cos2_bump"; }
};

class PolyBump final : public ProfileImpl {
 public:
  Jet jet(double t) const override {
    if (std::abs(t) >= 0.5) return {};
    const double u = 1.0 - 4.0 * t * t;
    return {u * u * u, -24.0 * t * u * u, -24.0 * u * u + 384.0 * t * t * u};
  }
  bool even() const override { return true; }
  std::string describe() const override { return "poly_bump"; }
};

class Eta final : public ProfileImpl {
 public:
  Jet jet(double t) const override {
    if (std::abs(t) > 1.0) return {};
    const double u = t * t - 1.0;
    // (u^3 t)' = u^3 + 6 t^2 u^2;  '' = 6 t u^2 + 12 t u^2 + 24 t^3 u
    return {u * u * u * t, u * u * u + 6.0 * t * t * u * u, 18.0 * t * u * u + 24.0 * t * t * t * u};
  }
  std::string describe() const override { return "eta"; }
};

class Cantor final : public ProfileImpl {
 public:
  Cantor(int levels, Profile bump) : levels_(levels), bump_(std::move(bump)) {}
  Jet jet(double t) const override {
    if (levels_ <= 0 || t <= 0.0 || t >= 1.0) return {};
    double a = 0.0, len = 1.0, scale = 1.0;  // scale = 3^n
    for (int n = 1; n <= levels_; ++n) {
      scale *= 3.0;
      const double third = len / 3.0;
      if (t >= a + third && t <= a + 2.0 * third) {
        const double center = a + 0.5 * len;
        const Jet b = bump_.jet(scale * (t - center));
        return {b.value / scale, b.d1, b.d2 * scale};
      }
      if (t > a + 2.0 * third) a += 2.0 * third;
      len = third;
    }
    return {};
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "cantor(j=" << levels_ << "," << bump_.describe() << ")";
    return os.str();
  }

 private:
  int levels_;
  Profile bump_;
};

class Rescaled final : public ProfileImpl {
 public:
  Rescaled(Profile p, double c, double w) : p_(std::move(p)), c_(c), w_(w) {}
  Jet jet(double t) const override {
    const Jet j = p_.jet((t - c_) / w_);
    return {j.value, j.d1 / w_, j.d2 / (w_ * w_)};
  }
  std::string describe() const override {
    std::ostringstream os;
    os << p_.describe() << "((t-" << c_ << ")/" << w_ << ")";
    return os.str();
  }

 private:
  Profile p_;
  double c_, w_;
};

}  // namespace

Jet Profile::jet(double t) const {
  if (!impl_) throw InvalidParameter("empty profile");
  return impl_->jet(t);
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  return Profile(std::make_shared<Polynomial>(std::move(coeffs)));
}
Profile Profile::cosine(double amp, double freq, double phase) {
  return Profile(std::make_shared<Trig>(amp, freq, phase, false));
}
Profile Profile::sine(double amp, double freq, double phase) {
  return Profile(std::make_shared<Trig>(amp, freq, phase, true));
}
Profile Profile::log(double coeff, double scale) {
  if (!(scale > 0.0)) throw InvalidParameter("log profile scale must be positive");
  return Profile(std::make_shared<Log>(coeff, scale));
}
Profile Profile::cos2_bump() { return Profile(std::make_shared<Cos2Bump>()); }
Profile Profile::poly_bump() { return Profile(std::make_shared<PolyBump>()); }
Profile Profile::cantor_eta() { return Profile(std::make_shared<Eta>()); }

Profile Profile::rescaled(Profile p, double center, double width) {
  if (!(width > 0.0)) throw InvalidParameter("rescaled profile width must be positive");
  return Profile(std::make_shared<Rescaled>(std::move(p), center, width));
}

Profile Profile::cantor(int levels, Profile bump) {
  if (levels < 0) throw InvalidParameter("cantor level must be nonnegative");
  if (levels > 12) throw InvalidParameter("cantor level must be at most 12");
  // Support check: {bump > 0} = (-1/2, 1/2).
  for (int k = 1; k < 64; ++k) {
    const double t = -0.5 + k / 64.0;
    if (!(bump(t) > 0.0)) throw InvalidParameter("bump must be positive on (-1/2, 1/2)");
  }
  for (double t : {-0.5, 0.5, -0.75, 0.75, -2.0, 2.0})
    if (bump(t) != 0.0) throw InvalidParameter("bump must vanish outside (-1/2, 1/2)");
  return Profile(std::make_shared<Cantor>(levels, std::move(bump)));
}

}  // namespace kappa
