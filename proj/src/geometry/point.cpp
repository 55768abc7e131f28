#include "kappa/point.hpp"

#include <sstream>

#include "kappa/errors.hpp"

namespace kappa {

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidParameter("point dimension must be 1, 2 or 3");
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) throw InvalidParameter("point dimension must be 1, 2 or 3");
  size_t i = 0;
  for (double v : coords) c_[i++] = v;
}

Point Point::unit(int dim, int axis) {
  Point p(dim);
  if (axis < 0 || axis >= dim) throw InvalidParameter("axis out of range");
  p[axis] = 1.0;
  return p;
}

bool Point::finite() const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite((*this)[i])) return false;
  return true;
}

std::string Point::str() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << (*this)[i];
  os << ')';
  return os.str();
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] += o[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] -= o[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

Point operator+(Point a, const Point& b) { return a += b; }
Point operator-(Point a, const Point& b) { return a -= b; }
Point operator-(Point a) { return a *= -1.0; }
Point operator*(Point a, double s) { return a *= s; }
Point operator*(double s, Point a) { return a *= s; }
Point operator/(Point a, double s) { return a *= 1.0 / s; }

bool operator==(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Point& a) { return dot(a, a); }
double norm(const Point& a) { return std::sqrt(norm2(a)); }
double distance(const Point& a, const Point& b) { return norm(a - b); }

}  // namespace kappa
