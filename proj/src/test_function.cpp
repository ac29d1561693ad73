#include "divcap/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace divcap {

TestFunction::TestFunction(Kind k, Point c, double r, int degree, Point half)
    : kind_(k), center_(c), radius_(r), degree_(degree), half_(half) {}

TestFunction TestFunction::radial_hat(const Point& center, double radius) {
  require_dim(center.dim());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("hat radius must be positive");
  return TestFunction(Kind::radial_hat, center, radius, 1, Point(center.dim()));
}

TestFunction TestFunction::smooth_bump(const Point& center, double radius, int degree) {
  require_dim(center.dim());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("bump radius must be positive");
  if (degree < 1) throw DomainError("bump degree must be >= 1");
  return TestFunction(Kind::smooth_bump, center, radius, degree, Point(center.dim()));
}

TestFunction TestFunction::tensor_spline(const Box& box) {
  const int n = box.dim();
  Point half(n);
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    half[i] = 0.5 * box.extent(i);
    if (!(half[i] > 0.0)) throw DomainError("tensor spline box must have positive extent");
    r2 += half[i] * half[i];
  }
  return TestFunction(Kind::tensor_spline, box.center(), std::sqrt(r2), 2, half);
}

double TestFunction::operator()(const Point& x) const {
  require_same_dim(dim(), x.dim(), "test function");
  switch (kind_) {
    case Kind::radial_hat: return std::max(0.0, 1.0 - distance(x, center_) / radius_);
    case Kind::smooth_bump: {
      const double t = 1.0 - norm2(x - center_) / (radius_ * radius_);
      return t > 0.0 ? std::pow(t, degree_) : 0.0;
    }
    default: {
      double v = 1.0;
      for (int i = 0; i < dim(); ++i) {
        const double t = (x[i] - center_[i]) / half_[i];
        if (std::abs(t) >= 1.0) return 0.0;
        const double u = 1.0 - t * t;
        v *= u * u;
      }
      return v;
    }
  }
}

Point TestFunction::gradient(const Point& x) const {
  require_same_dim(dim(), x.dim(), "test function");
  const int n = dim();
  Point g(n);
  switch (kind_) {
    case Kind::radial_hat: {
      const double d = distance(x, center_);
      if (d >= radius_ || d == 0.0) return g;
      return (x - center_) * (-1.0 / (radius_ * d));
    }
    case Kind::smooth_bump: {
      const double r2 = radius_ * radius_;
      const double t = 1.0 - norm2(x - center_) / r2;
      if (t <= 0.0) return g;
      return (x - center_) * (-2.0 * degree_ * std::pow(t, degree_ - 1) / r2);
    }
    default: {
      std::array<double, kMaxDim> f{}, df{};
      for (int i = 0; i < n; ++i) {
        const double t = (x[i] - center_[i]) / half_[i];
        if (std::abs(t) >= 1.0) return g;
        const double u = 1.0 - t * t;
        f[i] = u * u;
        df[i] = -4.0 * t * u / half_[i];
      }
      for (int i = 0; i < n; ++i) {
        double v = df[i];
        for (int j = 0; j < n; ++j) {
          if (j != i) v *= f[j];
        }
        g[i] = v;
      }
      return g;
    }
  }
}

Ball TestFunction::support() const { return Ball(center_, radius_); }

double TestFunction::lipschitz() const {
  switch (kind_) {
    case Kind::radial_hat: return 1.0 / radius_;
    case Kind::smooth_bump: {
      // max of 2m s (1 - s^2)^{m-1} / r over s in [0, 1]
      const double m = degree_;
      const double s = m == 1 ? 1.0 : 1.0 / std::sqrt(2.0 * m - 1.0);
      return 2.0 * m * s * std::pow(1.0 - s * s, m - 1) / radius_;
    }
    default: {
      // each 1-D factor has |f'| <= 8 / (3 sqrt 3 half), |f| <= 1
      double s = 0.0;
      for (int i = 0; i < dim(); ++i) {
        const double d = 8.0 / (3.0 * std::sqrt(3.0) * half_[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::radial_hat: os << "hat(r=" << radius_ << ")"; break;
    case Kind::smooth_bump: os << "bump(r=" << radius_ << ",deg=" << degree_ << ")"; break;
    default: os << "tensor(half=" << half_[0] << ")"; break;
  }
  return os.str();
}

std::vector<TestFunction> test_function_library(const Point& center, double base_radius) {
  std::vector<TestFunction> lib;
  for (double f : {1.0, 0.5, 2.0}) lib.push_back(TestFunction::radial_hat(center, base_radius * f));
  lib.push_back(TestFunction::smooth_bump(center, base_radius, 2));
  lib.push_back(TestFunction::smooth_bump(center, 1.5 * base_radius, 3));
  const int n = center.dim();
  Point lo = center, hi = center;
  for (int i = 0; i < n; ++i) {
    lo[i] -= base_radius;
    hi[i] += base_radius;
  }
  lib.push_back(TestFunction::tensor_spline(Box(lo, hi)));
  return lib;
}

}  // namespace divcap
