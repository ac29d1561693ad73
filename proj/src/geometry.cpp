#include "divcap/geometry.hpp"

#include <algorithm>

namespace divcap {

void require_dim(int n) {
  if (n < 1 || n > kMaxDim) {
    throw DomainError("ambient dimension must be in [1, 4], got " + std::to_string(n));
  }
}

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

Point::Point(int n) : n_(n) { require_dim(n); }

Point::Point(std::initializer_list<double> coords) : n_(static_cast<int>(coords.size())) {
  require_dim(n_);
  std::copy(coords.begin(), coords.end(), c_.begin());
  for (int i = 0; i < n_; ++i) {
    if (!std::isfinite(c_[i])) throw DomainError("point coordinates must be finite");
  }
}

Point Point::from(const std::vector<double>& coords) {
  Point p(static_cast<int>(coords.size()));
  for (int i = 0; i < p.n_; ++i) {
    if (!std::isfinite(coords[i])) throw DomainError("point coordinates must be finite");
    p.c_[i] = coords[i];
  }
  return p;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double t) {
  for (int i = 0; i < n_; ++i) c_[i] *= t;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.n_ != b.n_) return false;
  for (int i = 0; i < a.n_; ++i) {
    if (a.c_[i] != b.c_[i]) return false;
  }
  return true;
}

double norm2(const Point& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) s += p[i] * p[i];
  return s;
}

double norm(const Point& p) { return std::sqrt(norm2(p)); }

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

Ball::Ball(Point c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ball radius must be positive and finite");
}

Box::Box(Point lo_, Point hi_) : lo(lo_), hi(hi_) {
  require_same_dim(lo.dim(), hi.dim(), "Box");
  for (int i = 0; i < lo.dim(); ++i) {
    if (!(hi[i] > lo[i])) throw DomainError("box must have positive extent on every axis");
  }
}

Box Box::cube(int n, double lo, double hi) {
  Point a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = lo;
    b[i] = hi;
  }
  return {a, b};
}

bool Box::contains(const Point& x) const {
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

double distance_to_box(const Point& x, const Point& lo, double side) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) {
      d = lo[i] - x[i];
    } else if (x[i] > lo[i] + side) {
      d = x[i] - (lo[i] + side);
    }
    s += d * d;
  }
  return std::sqrt(s);
}

double unit_ball_volume(int n) {
  require_dim(n);
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: return std::numbers::pi * std::numbers::pi / 2.0;
  }
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace divcap
