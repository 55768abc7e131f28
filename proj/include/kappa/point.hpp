#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

namespace kappa {

inline constexpr int kMaxDim = 3;

/// A point (or vector) of R^n for n in {1, 2, 3}. Value type, fixed capacity.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);

  static Point zero(int dim) { return Point(dim); }
  static Point unit(int dim, int axis);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<size_t>(i)]; }

  bool finite() const;
  std::string str() const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

using Vec = Point;

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);
Point operator-(Point a);
Point operator*(Point a, double s);
Point operator*(double s, Point a);
Point operator/(Point a, double s);
bool operator==(const Point& a, const Point& b);

double dot(const Point& a, const Point& b);
double norm(const Point& a);
double norm2(const Point& a);
double distance(const Point& a, const Point& b);

}  // namespace kappa
