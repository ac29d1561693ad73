#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace divcap {

inline constexpr int kMaxDim = 4;

/// Raised when an argument violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point of R^n, 1 <= n <= 4, stored inline.
class Point {
 public:
  Point() = default;
  explicit Point(int n);
  Point(std::initializer_list<double> coords);
  static Point from(const std::vector<double>& coords);

  int dim() const { return n_; }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  const double* data() const { return c_.data(); }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + n_}; }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double t);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double t) { return a *= t; }
  friend Point operator*(double t, Point a) { return a *= t; }
  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxDim> c_{};
  int n_ = 0;
};

double norm(const Point& p);
double norm2(const Point& p);
double distance(const Point& a, const Point& b);
double dot(const Point& a, const Point& b);

struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r);
  int dim() const { return center.dim(); }
  /// Open-ball membership.
  bool contains(const Point& x) const { return distance(x, center) < radius; }
};

/// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  Box() = default;
  Box(Point lo_, Point hi_);
  static Box cube(int n, double lo, double hi);
  int dim() const { return lo.dim(); }
  double diameter() const { return distance(lo, hi); }
  double extent(int axis) const { return hi[axis] - lo[axis]; }
  Point center() const { return 0.5 * (lo + hi); }
  bool contains(const Point& x) const;
};

/// Distance from x to the closed box (0 inside).
double distance_to_box(const Point& x, const Point& lo, double side);

/// Volume of the unit n-ball.
double unit_ball_volume(int n);
/// Surface area of the unit sphere S^{n-1} (= n * unit_ball_volume(n)).
double unit_sphere_area(int n);

void require_dim(int n);
void require_same_dim(int a, int b, const char* what);

}  // namespace divcap
