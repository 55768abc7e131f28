#include "kappa/scalar_field.hpp"

#include <cmath>
#include <sstream>

#include "kappa/errors.hpp"

namespace kappa {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class Constant final : public FieldImpl {
 public:
  explicit Constant(double c) : c_(c) {}
  double eval(const Point&) const override { return c_; }
  Vec grad(const Point& x) const override { return Vec(x.dim()); }
  double laplacian(const Point&) const override { return 0.0; }
  std::string describe() const override { return "const(" + num(c_) + ")"; }
  double value() const { return c_; }

 private:
  double c_;
};

class Affine final : public FieldImpl {
 public:
  Affine(Vec a, double b) : a_(a), b_(b) {}
  double eval(const Point& x) const override { return dot(a_, x) + b_; }
  Vec grad(const Point& x) const override {
    if (x.dim() != a_.dim()) throw InvalidParameter("affine field dimension mismatch");
    return a_;
  }
  double laplacian(const Point&) const override { return 0.0; }
  std::string describe() const override { return "affine(" + a_.str() + "," + num(b_) + ")"; }

 private:
  Vec a_;
  double b_;
};

class AlongAxis final : public FieldImpl {
 public:
  AlongAxis(Profile p, int axis) : p_(std::move(p)), axis_(axis) {}
  double eval(const Point& x) const override { return p_(coord(x)); }
  Vec grad(const Point& x) const override {
    Vec g(x.dim());
    g[axis_] = p_.jet(coord(x)).d1;
    return g;
  }
  double laplacian(const Point& x) const override { return p_.jet(coord(x)).d2; }
  std::string describe() const override { return p_.describe() + "(x" + std::to_string(axis_ + 1) + ")"; }

 private:
  double coord(const Point& x) const {
    if (axis_ >= x.dim()) throw InvalidParameter("field axis exceeds point dimension");
    return x[axis_];
  }
  Profile p_;
  int axis_;
};

class Separable final : public FieldImpl {
 public:
  Separable(Profile pa, int a, Profile pb, int b) : pa_(std::move(pa)), pb_(std::move(pb)), a_(a), b_(b) {}
  double eval(const Point& x) const override { return pa_(x[a_]) * pb_(x[b_]); }
  Vec grad(const Point& x) const override {
    const Jet ja = pa_.jet(x[a_]), jb = pb_.jet(x[b_]);
    Vec g(x.dim());
    g[a_] = ja.d1 * jb.value;
    g[b_] = ja.value * jb.d1;
    return g;
  }
  double laplacian(const Point& x) const override {
    const Jet ja = pa_.jet(x[a_]), jb = pb_.jet(x[b_]);
    return ja.d2 * jb.value + ja.value * jb.d2;
  }
  std::string describe() const override {
    return pa_.describe() + "(x" + std::to_string(a_ + 1) + ")*" + pb_.describe() + "(x" + std::to_string(b_ + 1) + ")";
  }

 private:
  Profile pa_, pb_;
  int a_, b_;
};

class Radial final : public FieldImpl {
 public:
  Radial(Profile p, Point c) : p_(std::move(p)), c_(c) {}
  double eval(const Point& x) const override { return p_(distance(x, c_)); }
  bool singular_at(const Point& x) const override {
    const double rho = distance(x, c_);
    return rho == 0.0 && !p_.even();
  }
  Vec grad(const Point& x) const override {
    const double rho = distance(x, c_);
    if (rho == 0.0) {
      if (!p_.even()) throw SingularityError("radial field gradient undefined at center " + c_.str());
      return Vec(x.dim());
    }
    return (p_.jet(rho).d1 / rho) * (x - c_);
  }
  double laplacian(const Point& x) const override {
    const double rho = distance(x, c_);
    if (rho == 0.0) {
      if (!p_.even()) throw SingularityError("radial field laplacian undefined at center " + c_.str());
      return x.dim() * p_.jet(0.0).d2;
    }
    const Jet j = p_.jet(rho);
    return j.d2 + (x.dim() - 1) * j.d1 / rho;
  }
  std::string describe() const override { return "radial[" + p_.describe() + "," + c_.str() + "]"; }

 private:
  Profile p_;
  Point c_;
};

class SignedDistanceField final : public FieldImpl {
 public:
  explicit SignedDistanceField(Domain d) : d_(std::move(d)) {}
  double eval(const Point& x) const override { return d_.signed_distance(x); }
  Vec grad(const Point& x) const override { return d_.grad_signed_distance(x); }
  double laplacian(const Point& x) const override { return d_.laplacian_signed_distance(x); }
  bool singular_at(const Point& x) const override { return d_.singular_at(x); }
  std::string describe() const override { return "V[" + d_.name() + "]"; }

 private:
  Domain d_;
};

class Sum final : public FieldImpl {
 public:
  Sum(ScalarField a, ScalarField b, double sb) : a_(std::move(a)), b_(std::move(b)), sb_(sb) {}
  double eval(const Point& x) const override { return a_.eval(x) + sb_ * b_.eval(x); }
  Vec grad(const Point& x) const override { return a_.grad(x) + sb_ * b_.grad(x); }
  double laplacian(const Point& x) const override { return a_.laplacian(x) + sb_ * b_.laplacian(x); }
  bool singular_at(const Point& x) const override { return a_.singular_at(x) || b_.singular_at(x); }
  std::string describe() const override {
    return "(" + a_.describe() + (sb_ < 0 ? " - " : " + ") + b_.describe() + ")";
  }

 private:
  ScalarField a_, b_;
  double sb_;
};

class Product final : public FieldImpl {
 public:
  Product(ScalarField a, ScalarField b) : a_(std::move(a)), b_(std::move(b)) {}
  double eval(const Point& x) const override { return a_.eval(x) * b_.eval(x); }
  Vec grad(const Point& x) const override { return b_.eval(x) * a_.grad(x) + a_.eval(x) * b_.grad(x); }
  double laplacian(const Point& x) const override {
    return b_.eval(x) * a_.laplacian(x) + a_.eval(x) * b_.laplacian(x) + 2.0 * dot(a_.grad(x), b_.grad(x));
  }
  bool singular_at(const Point& x) const override { return a_.singular_at(x) || b_.singular_at(x); }
  std::string describe() const override { return a_.describe() + "*" + b_.describe(); }

 private:
  ScalarField a_, b_;
};

class Scaled final : public FieldImpl {
 public:
  Scaled(double s, ScalarField a, double shift) : s_(s), shift_(shift), a_(std::move(a)) {}
  double eval(const Point& x) const override { return s_ * a_.eval(x) + shift_; }
  Vec grad(const Point& x) const override { return s_ * a_.grad(x); }
  double laplacian(const Point& x) const override { return s_ * a_.laplacian(x); }
  bool singular_at(const Point& x) const override { return a_.singular_at(x); }
  std::string describe() const override {
    return (s_ == 1.0 ? "" : num(s_) + "*") + a_.describe() + (shift_ == 0.0 ? "" : "+" + num(shift_));
  }

 private:
  double s_, shift_;
  ScalarField a_;
};

class Exp final : public FieldImpl {
 public:
  explicit Exp(ScalarField a) : a_(std::move(a)) {}
  double eval(const Point& x) const override { return std::exp(a_.eval(x)); }
  Vec grad(const Point& x) const override { return std::exp(a_.eval(x)) * a_.grad(x); }
  double laplacian(const Point& x) const override {
    return std::exp(a_.eval(x)) * (a_.laplacian(x) + a_.gamma(x));
  }
  bool singular_at(const Point& x) const override { return a_.singular_at(x); }
  std::string describe() const override { return "exp(" + a_.describe() + ")"; }

 private:
  ScalarField a_;
};

}  // namespace

const FieldImpl& ScalarField::impl() const {
  if (!impl_) throw InvalidParameter("empty scalar field");
  return *impl_;
}

Vec ScalarField::grad(const Point& x) const {
  if (impl().singular_at(x)) throw SingularityError("gradient of " + describe() + " undefined at " + x.str());
  return impl().grad(x);
}

double ScalarField::laplacian(const Point& x) const {
  if (impl().singular_at(x)) throw SingularityError("laplacian of " + describe() + " undefined at " + x.str());
  return impl().laplacian(x);
}

std::optional<double> ScalarField::is_constant() const {
  if (const auto* c = dynamic_cast<const Constant*>(impl_.get())) return c->value();
  return std::nullopt;
}

ScalarField ScalarField::constant(double c) { return ScalarField(std::make_shared<Constant>(c)); }

ScalarField ScalarField::affine(Vec a, double b) { return ScalarField(std::make_shared<Affine>(a, b)); }

ScalarField ScalarField::along_axis(Profile p, int axis) {
  if (axis < 0 || axis >= kMaxDim) throw InvalidParameter("axis out of range");
  return ScalarField(std::make_shared<AlongAxis>(std::move(p), axis));
}

ScalarField ScalarField::separable(Profile pa, int axis_a, Profile pb, int axis_b) {
  if (axis_a == axis_b) throw InvalidParameter("separable field requires distinct axes");
  return ScalarField(std::make_shared<Separable>(std::move(pa), axis_a, std::move(pb), axis_b));
}

ScalarField ScalarField::radial(Profile p, Point center) {
  return ScalarField(std::make_shared<Radial>(std::move(p), center));
}

ScalarField ScalarField::log_radial(Point center, double scale, double coeff) {
  return radial(Profile::log(coeff, scale), center);
}

ScalarField ScalarField::signed_distance(Domain domain) {
  return ScalarField(std::make_shared<SignedDistanceField>(std::move(domain)));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField(std::make_shared<Sum>(a, b, 1.0));
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return ScalarField(std::make_shared<Sum>(a, b, -1.0));
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return ScalarField(std::make_shared<Product>(a, b));
}
ScalarField operator*(double s, const ScalarField& a) { return ScalarField(std::make_shared<Scaled>(s, a, 0.0)); }
ScalarField operator+(const ScalarField& a, double c) { return ScalarField(std::make_shared<Scaled>(1.0, a, c)); }
ScalarField exp(const ScalarField& a) { return ScalarField(std::make_shared<Exp>(a)); }

ScalarField boundary_curvature_bound(const Domain& domain, double base_curvature) {
  if (base_curvature != 0.0)
    throw UnsupportedGeometry("boundary curvature bounds are certified for Euclidean base spaces only");
  switch (domain.kind()) {
    case DomainKind::Ball:
      return ScalarField::constant(cot_k(0.0, domain.radius()));
    case DomainKind::BallComplement:
      return ScalarField::constant(-cot_k(0.0, domain.radius()));
    case DomainKind::HalfSpace:
    case DomainKind::Box:
    case DomainKind::Interval:
      return ScalarField::constant(0.0);
  }
  throw UnsupportedGeometry("no boundary curvature bound for " + domain.name());
}

}  // namespace kappa
