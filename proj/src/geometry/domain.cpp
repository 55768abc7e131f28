#include "kappa/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kappa/errors.hpp"

namespace kappa {
namespace {

constexpr double kSkeletonTol = 1e-12;

bool near_center(const Point& x, const Point& c, double r) { return distance(x, c) <= 1e-14 * r; }

}  // namespace

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw InvalidParameter("interval requires a < b");
  Domain d(DomainKind::Interval, 1);
  d.lo_ = Point{a};
  d.hi_ = Point{b};
  return d;
}

Domain Domain::box(Point lo, Point hi) {
  if (lo.dim() != hi.dim()) throw InvalidParameter("box bounds differ in dimension");
  for (int i = 0; i < lo.dim(); ++i)
    if (!(lo[i] < hi[i])) throw InvalidParameter("box requires lo < hi on every axis");
  Domain d(DomainKind::Box, lo.dim());
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::ball(Point center, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("ball radius must be positive");
  Domain d(DomainKind::Ball, center.dim());
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::ball_complement(Point center, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("ball radius must be positive");
  Domain d(DomainKind::BallComplement, center.dim());
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::half_space(int dim, int axis, double level) {
  if (dim < 1 || dim > kMaxDim) throw InvalidParameter("half-space dimension must be 1, 2 or 3");
  if (axis < 0 || axis >= dim) throw InvalidParameter("half-space axis out of range");
  Domain d(DomainKind::HalfSpace, dim);
  d.axis_ = axis;
  d.level_ = level;
  return d;
}

std::string Domain::name() const {
  std::ostringstream os;
  os.precision(10);
  switch (kind_) {
    case DomainKind::Interval: os << "Interval[" << lo_[0] << "," << hi_[0] << "]"; break;
    case DomainKind::Box: os << "Box" << lo_.str() << "-" << hi_.str(); break;
    case DomainKind::Ball: os << "Ball(" << center_.str() << "," << radius_ << ")"; break;
    case DomainKind::BallComplement: os << "BallComplement(" << center_.str() << "," << radius_ << ")"; break;
    case DomainKind::HalfSpace: os << "HalfSpace(x" << axis_ + 1 << ">=" << level_ << ",n=" << dim_ << ")"; break;
  }
  return os.str();
}

void Domain::check_dim(const Point& x) const {
  if (x.dim() != dim_) throw InvalidParameter("point dimension does not match domain " + name());
}

double Domain::signed_distance(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case DomainKind::Interval:
      return std::max(lo_[0] - x[0], x[0] - hi_[0]);
    case DomainKind::Box: {
      double inside = -std::numeric_limits<double>::infinity();
      double outside2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double c = 0.5 * (lo_[i] + hi_[i]);
        const double q = std::abs(x[i] - c) - 0.5 * (hi_[i] - lo_[i]);
        inside = std::max(inside, q);
        if (q > 0.0) outside2 += q * q;
      }
      return inside > 0.0 ? std::sqrt(outside2) : inside;
    }
    case DomainKind::Ball:
      return distance(x, center_) - radius_;
    case DomainKind::BallComplement:
      return radius_ - distance(x, center_);
    case DomainKind::HalfSpace:
      return level_ - x[axis_];
  }
  return 0.0;
}

bool Domain::singular_at(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case DomainKind::Ball:
    case DomainKind::BallComplement:
      return near_center(x, center_, radius_);
    case DomainKind::HalfSpace:
      return false;
    case DomainKind::Interval:
    case DomainKind::Box: {
      // Inside: the medial set (ties between faces, or the midpoint of the
      // nearest axis). On/outside: edges and corners of the boundary.
      std::vector<double> q(static_cast<size_t>(dim_));
      double qmax = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) {
        const double c = 0.5 * (lo_[i] + hi_[i]);
        q[i] = std::abs(x[i] - c) - 0.5 * (hi_[i] - lo_[i]);
        qmax = std::max(qmax, q[i]);
      }
      const double scale = kSkeletonTol * (1.0 + std::abs(qmax));
      int ties = 0;
      for (double v : q)
        if (std::abs(v - qmax) <= scale) ++ties;
      if (qmax < -scale) {
        if (ties > 1) return true;
        for (int i = 0; i < dim_; ++i)
          if (std::abs(q[i] - qmax) <= scale &&
              std::abs(x[i] - 0.5 * (lo_[i] + hi_[i])) <= kSkeletonTol * (hi_[i] - lo_[i]))
            return true;
        return false;
      }
      int on = 0;
      for (double v : q)
        if (std::abs(v) <= scale) ++on;
      return std::abs(qmax) <= scale && on > 1;
    }
  }
  return false;
}

Vec Domain::grad_signed_distance(const Point& x) const {
  if (singular_at(x)) throw SingularityError("grad V undefined at " + x.str() + " for " + name());
  Vec g(dim_);
  switch (kind_) {
    case DomainKind::Ball:
      return (x - center_) / distance(x, center_);
    case DomainKind::BallComplement:
      return (center_ - x) / distance(x, center_);
    case DomainKind::HalfSpace:
      g[axis_] = -1.0;
      return g;
    case DomainKind::Interval:
    case DomainKind::Box: {
      double qmax = -std::numeric_limits<double>::infinity();
      int arg = 0;
      Vec qplus(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double c = 0.5 * (lo_[i] + hi_[i]);
        const double q = std::abs(x[i] - c) - 0.5 * (hi_[i] - lo_[i]);
        const double s = x[i] >= c ? 1.0 : -1.0;
        if (q > qmax) {
          qmax = q;
          arg = i;
        }
        qplus[i] = q > 0.0 ? s * q : 0.0;
      }
      if (qmax > 0.0) return qplus / norm(qplus);
      g[arg] = x[arg] >= 0.5 * (lo_[arg] + hi_[arg]) ? 1.0 : -1.0;
      return g;
    }
  }
  return g;
}

double Domain::laplacian_signed_distance(const Point& x) const {
  if (singular_at(x)) throw SingularityError("laplacian of V undefined at " + x.str() + " for " + name());
  const double n = dim_;
  switch (kind_) {
    case DomainKind::Ball:
      return (n - 1.0) / distance(x, center_);
    case DomainKind::BallComplement:
      return -(n - 1.0) / distance(x, center_);
    case DomainKind::HalfSpace:
      return 0.0;
    case DomainKind::Interval:
    case DomainKind::Box: {
      int positive = 0;
      double q2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double c = 0.5 * (lo_[i] + hi_[i]);
        const double q = std::abs(x[i] - c) - 0.5 * (hi_[i] - lo_[i]);
        if (q > 0.0) {
          ++positive;
          q2 += q * q;
        }
      }
      if (positive <= 1) return 0.0;
      return (positive - 1.0) / std::sqrt(q2);
    }
  }
  return 0.0;
}

Reflection Domain::reflect_into(const Point& x) const {
  const double v = signed_distance(x);
  if (v <= 0.0) return Reflection{x, 0.0, std::nullopt};
  Reflection r;
  r.push = v;
  switch (kind_) {
    case DomainKind::Ball:
    case DomainKind::BallComplement: {
      const double rho = distance(x, center_);
      if (near_center(x, center_, radius_))
        throw SingularityError("projection undefined at the center of " + name());
      const Vec e = (x - center_) / rho;
      // Rounding may leave the projection an ulp outside; step toward Y.
      double s = radius_;
      const double toward = kind_ == DomainKind::Ball ? 0.0 : 2.0 * radius_;
      r.point = center_ + s * e;
      for (int k = 0; k < 8 && signed_distance(r.point) > 0.0; ++k) {
        s = std::nextafter(s, toward);
        r.point = center_ + s * e;
      }
      r.normal = kind_ == DomainKind::Ball ? -e : e;
      return r;
    }
    case DomainKind::HalfSpace: {
      r.point = x;
      r.point[axis_] = level_;
      Vec n(dim_);
      n[axis_] = 1.0;
      r.normal = n;
      return r;
    }
    case DomainKind::Interval:
    case DomainKind::Box: {
      r.point = x;
      for (int i = 0; i < dim_; ++i) r.point[i] = std::clamp(x[i], lo_[i], hi_[i]);
      r.normal = (r.point - x) / v;
      return r;
    }
  }
  return r;
}

double Domain::boundary_measure() const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case DomainKind::Interval:
      return 2.0;
    case DomainKind::Box: {
      if (dim_ == 1) return 2.0;
      double total = 0.0;
      for (int i = 0; i < dim_; ++i) {
        double face = 1.0;
        for (int j = 0; j < dim_; ++j)
          if (j != i) face *= hi_[j] - lo_[j];
        total += 2.0 * face;
      }
      return total;
    }
    case DomainKind::Ball:
    case DomainKind::BallComplement:
      if (dim_ == 1) return 2.0;
      if (dim_ == 2) return 2.0 * std::numbers::pi * radius_;
      return 4.0 * std::numbers::pi * radius_ * radius_;
    case DomainKind::HalfSpace:
      return dim_ == 1 ? 1.0 : inf;
  }
  return inf;
}

double Domain::volume() const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case DomainKind::Interval:
      return hi_[0] - lo_[0];
    case DomainKind::Box: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
      return v;
    }
    case DomainKind::Ball:
      if (dim_ == 1) return 2.0 * radius_;
      if (dim_ == 2) return std::numbers::pi * radius_ * radius_;
      return 4.0 / 3.0 * std::numbers::pi * radius_ * radius_ * radius_;
    default:
      return inf;
  }
}

double signed_distance(const Domain& domain, const Point& x) { return domain.signed_distance(x); }

Reflection reflect_into(const Domain& domain, const Point& x) { return domain.reflect_into(x); }

double cot_k(double K, double r) {
  if (!(r > 0.0)) throw InvalidParameter("cot_K requires r > 0");
  if (K == 0.0) return 1.0 / r;
  if (K > 0.0) {
    const double s = std::sqrt(K);
    if (s * r >= std::numbers::pi) throw InvalidParameter("cot_K requires sqrt(K) r < pi");
    return s / std::tan(s * r);
  }
  const double s = std::sqrt(-K);
  return s / std::tanh(s * r);
}

double comparison_potential(double r, const Point& z, double K, const Point& x) {
  if (!(r > 0.0)) throw InvalidParameter("comparison potential requires r > 0");
  const double d = distance(x, z);
  if (K == 0.0) return (r * r - d * d) / (2.0 * r);
  if (K > 0.0) {
    const double s = std::sqrt(K);
    return (std::cos(s * d) - std::cos(s * r)) / (s * std::sin(s * r));
  }
  const double s = std::sqrt(-K);
  return (std::cosh(s * r) - std::cosh(s * d)) / (s * std::sinh(s * r));
}

}  // namespace kappa
