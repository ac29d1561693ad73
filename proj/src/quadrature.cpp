#include "divcap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "divcap/cantor_integral.hpp"
#include "divcap/parallel.hpp"

namespace divcap {

namespace {

constexpr double kPi = std::numbers::pi;
// Angular phase that keeps polar nodes off symmetry axes of the integrand.
constexpr double kPhase = 0.6180339887498949;

struct Rule {
  int m;
  std::array<double, 3> node;    // on [0, 1]
  std::array<double, 3> weight;  // sums to 1
};

Rule rule_for(int d) {
  if (d <= 2) {
    const double a = 0.5 * std::sqrt(3.0 / 5.0);
    return {3, {0.5 - a, 0.5, 0.5 + a}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
  }
  const double a = 0.5 / std::sqrt(3.0);
  return {2, {0.5 - a, 0.5 + a, 0.0}, {0.5, 0.5, 0.0}};
}

struct Region {
  std::array<double, kMaxDim> lo{};
  int level = 0;
  double side = 1.0;
  double value = 0.0;  // sum of the children rules
  double err = 0.0;
  std::array<double, 16> child{};
  std::uint64_t id = 0;
};

struct ByError {
  bool operator()(const Region& a, const Region& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.id > b.id;
  }
};

class Engine {
 public:
  Engine(int d, const std::function<double(const double*)>& g, const QuadratureConfig& q)
      : d_(d), g_(g), q_(q), rule_(rule_for(d)) {}

  QuadResult run() {
    const int base = q_.base_subdivisions;
    const double side = 1.0 / base;
    std::size_t cells = 1;
    for (int i = 0; i < d_; ++i) cells *= static_cast<std::size_t>(base);
    heap_.reserve(cells * 4);
    for (std::size_t c = 0; c < cells; ++c) {
      std::array<double, kMaxDim> lo{};
      std::size_t rem = c;
      for (int i = d_ - 1; i >= 0; --i) {
        lo[i] = static_cast<double>(rem % static_cast<std::size_t>(base)) * side;
        rem /= static_cast<std::size_t>(base);
      }
      push(make_region(lo, side, 0, apply_rule(lo, side)));
    }
    double total = 0.0, total_err = 0.0;
    recompute(total, total_err);
    std::size_t since_recompute = 0;
    while (total_err > q_.rel_tol * std::abs(total) && !heap_.empty()) {
      if (evals_ >= q_.max_evals) break;
      std::pop_heap(heap_.begin(), heap_.end(), ByError{});
      Region r = heap_.back();
      heap_.pop_back();
      if (r.level >= q_.max_depth) {
        frozen_.push_back(r);
        continue;
      }
      total -= r.value;
      total_err -= r.err;
      const double half = r.side * 0.5;
      const int kids = 1 << d_;
      for (int b = 0; b < kids; ++b) {
        std::array<double, kMaxDim> lo = r.lo;
        for (int i = 0; i < d_; ++i) {
          if ((b >> i) & 1) lo[i] += half;
        }
        Region child = make_region(lo, half, r.level + 1, r.child[static_cast<std::size_t>(b)]);
        total += child.value;
        total_err += child.err;
        push(std::move(child));
      }
      if (++since_recompute == 256) {
        recompute(total, total_err);
        since_recompute = 0;
      }
    }
    QuadResult res;
    recompute(res.value, res.error_estimate);
    res.evals = evals_;
    res.converged = res.error_estimate <= q_.rel_tol * std::abs(res.value);
    return res;
  }

 private:
  void push(Region r) {
    r.id = next_id_++;
    heap_.push_back(std::move(r));
    std::push_heap(heap_.begin(), heap_.end(), ByError{});
  }

  void recompute(double& total, double& total_err) const {
    CompensatedSum v, e;
    for (const auto& r : heap_) {
      v.add(r.value);
      e.add(r.err);
    }
    for (const auto& r : frozen_) {
      v.add(r.value);
      e.add(r.err);
    }
    total = v.value();
    total_err = e.value();
  }

  double apply_rule(const std::array<double, kMaxDim>& lo, double side) {
    const int m = rule_.m;
    int total = 1;
    for (int i = 0; i < d_; ++i) total *= m;
    double sum = 0.0;
    std::array<double, kMaxDim> u{};
    for (int idx = 0; idx < total; ++idx) {
      int rem = idx;
      double w = 1.0;
      for (int i = 0; i < d_; ++i) {
        const int k = rem % m;
        rem /= m;
        u[i] = lo[i] + side * rule_.node[k];
        w *= rule_.weight[k];
      }
      double v = g_(u.data());
      if (!std::isfinite(v)) {
        // A node sitting exactly on a null singular set: nudge it once.
        for (int i = 0; i < d_; ++i) u[i] += side * 1e-7 * (i + 1);
        v = g_(u.data());
        if (!std::isfinite(v)) throw IntegrationError("integrand is not finite at a quadrature node");
      }
      sum += w * v;
    }
    evals_ += static_cast<std::size_t>(total);
    return sum * std::pow(side, d_);
  }

  Region make_region(const std::array<double, kMaxDim>& lo, double side, int level, double self) {
    Region r;
    r.lo = lo;
    r.side = side;
    r.level = level;
    const double half = side * 0.5;
    const int kids = 1 << d_;
    double sum = 0.0;
    for (int b = 0; b < kids; ++b) {
      std::array<double, kMaxDim> clo = lo;
      for (int i = 0; i < d_; ++i) {
        if ((b >> i) & 1) clo[i] += half;
      }
      r.child[static_cast<std::size_t>(b)] = apply_rule(clo, half);
      sum += r.child[static_cast<std::size_t>(b)];
    }
    r.value = sum;
    r.err = std::abs(self - sum);
    return r;
  }

  int d_;
  const std::function<double(const double*)>& g_;
  const QuadratureConfig& q_;
  Rule rule_;
  std::vector<Region> heap_;
  std::vector<Region> frozen_;
  std::size_t evals_ = 0;
  std::uint64_t next_id_ = 0;
};

// Hyperspherical map of [0,1]^n onto the annulus r0 <= |x - c| <= r1.
// Returns the Jacobian (including the parameter scaling) and writes x.
double annulus_map(const Point& c, double r0, double r1, const double* u, Point& x) {
  const int n = c.dim();
  const double dr = r1 - r0;
  x = c;
  switch (n) {
    case 1: {
      const double t = 2.0 * u[0] - 1.0;
      const double rho = r0 + std::abs(t) * dr;
      x[0] += t < 0.0 ? -rho : rho;
      return 2.0 * dr;
    }
    case 2: {
      const double rho = r0 + u[0] * dr;
      const double th = 2.0 * kPi * (u[1] + kPhase);
      x[0] += rho * std::cos(th);
      x[1] += rho * std::sin(th);
      return dr * 2.0 * kPi * rho;
    }
    case 3: {
      const double rho = r0 + u[0] * dr;
      const double ph = kPi * u[1];
      const double th = 2.0 * kPi * (u[2] + kPhase);
      const double sp = std::sin(ph);
      x[0] += rho * sp * std::cos(th);
      x[1] += rho * sp * std::sin(th);
      x[2] += rho * std::cos(ph);
      return dr * kPi * 2.0 * kPi * rho * rho * sp;
    }
    default: {
      const double rho = r0 + u[0] * dr;
      const double ps = kPi * u[1];
      const double ph = kPi * u[2];
      const double th = 2.0 * kPi * (u[3] + kPhase);
      const double s1 = std::sin(ps);
      const double s2 = std::sin(ph);
      x[0] += rho * std::cos(ps);
      x[1] += rho * s1 * std::cos(ph);
      x[2] += rho * s1 * s2 * std::cos(th);
      x[3] += rho * s1 * s2 * std::sin(th);
      return dr * kPi * kPi * 2.0 * kPi * rho * rho * rho * s1 * s1 * s2;
    }
  }
}

}  // namespace

void QuadratureConfig::validate() const {
  if (base_subdivisions < 4) throw DomainError("quadrature base subdivisions must be >= 4");
  if (max_depth < 0) throw DomainError("quadrature refinement depth must be >= 0");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("quadrature tolerance must lie in (0, 1)");
  if (max_evals == 0) throw DomainError("quadrature evaluation budget must be positive");
}

QuadResult adaptive_cubature(int d, const std::function<double(const double*)>& g,
                             const QuadratureConfig& q) {
  require_dim(d);
  q.validate();
  return Engine(d, g, q).run();
}

QuadResult integrate_annulus(const Point& c, double r_inner, double r_outer, const Integrand& f,
                             const QuadratureConfig& q) {
  if (!(r_inner >= 0.0 && r_outer > r_inner)) throw DomainError("annulus radii must satisfy 0 <= r0 < r1");
  const std::function<double(const double*)> g = [&](const double* u) {
    Point x;
    const double jac = annulus_map(c, r_inner, r_outer, u, x);
    if (jac == 0.0) return 0.0;
    return jac * f(x);
  };
  return adaptive_cubature(c.dim(), g, q);
}

QuadResult integrate_ball_fn(const Ball& b, const Integrand& f, const QuadratureConfig& q) {
  return integrate_annulus(b.center, 0.0, b.radius, f, q);
}

QuadResult integrate_box_fn(const Box& box, const Integrand& f, const QuadratureConfig& q) {
  const int n = box.dim();
  double vol = 1.0;
  for (int i = 0; i < n; ++i) vol *= box.extent(i);
  const std::function<double(const double*)> g = [&](const double* u) {
    Point x(n);
    for (int i = 0; i < n; ++i) x[i] = box.lo[i] + u[i] * box.extent(i);
    return vol * f(x);
  };
  return adaptive_cubature(n, g, q);
}

QuadResult integrate_box_ball_fn(const Box& box, const Ball& b, const Integrand& f, const QuadratureConfig& q) {
  require_same_dim(box.dim(), b.dim(), "integrate_box_ball_fn");
  const int n = box.dim();
  const double r2 = b.radius * b.radius;
  const std::function<double(const double*)> g = [&](const double* u) {
    Point x(n);
    double jac = 1.0, used = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rest = r2 - used;
      if (rest <= 0.0) return 0.0;
      const double R = std::sqrt(rest);
      const double a = std::max(box.lo[i], b.center[i] - R);
      const double c = std::min(box.hi[i], b.center[i] + R);
      if (!(c > a)) return 0.0;
      x[i] = a + u[i] * (c - a);
      jac *= c - a;
      const double d = x[i] - b.center[i];
      used += d * d;
    }
    return jac * f(x);
  };
  return adaptive_cubature(n, g, q);
}

double radial_ball_integral(int n, const RadialForm& form, double r) {
  const double e = n + form.eta;
  if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
  return form.coef * unit_sphere_area(n) * std::pow(r, e) / e;
}

QuadResult integrate_ball(const Weight& w, const Ball& b, const QuadratureConfig& q) {
  require_same_dim(w.dim(), b.dim(), "integrate_ball");
  if (auto problem = w.integrability_problem()) {
    throw IntegrationError("weight is not locally integrable: " + *problem, b);
  }
  if (const auto form = w.radial_form_about(b.center)) {
    QuadResult res;
    res.value = radial_ball_integral(b.dim(), *form, b.radius);
    res.closed_form = true;
    res.argmin = b.center;
    const double edge = form->coef * std::pow(b.radius, form->eta);
    if (form->eta < 0.0) {
      res.min_sample = edge;
      res.max_sample = std::numeric_limits<double>::infinity();
      Point x = b.center;
      x[0] += b.radius;
      res.argmin = x;
    } else if (form->eta > 0.0) {
      res.min_sample = 0.0;
      res.max_sample = edge;
    } else {
      res.min_sample = res.max_sample = form->coef;
    }
    return res;
  }
  if (const auto form = cantor_form(w); form && cantor_self_similar(form->n, form->lambda)) {
    try {
      return cantor_ball_integral(*form, b, q);
    } catch (const IntegrationError& e) {
      throw IntegrationError(e.what(), b);
    }
  }
  double wmin = std::numeric_limits<double>::infinity();
  double wmax = 0.0;
  Point argmin = b.center;
  const Integrand f = [&](const Point& x) {
    const double v = w.eval_unchecked(x);
    if (v < wmin) {
      wmin = v;
      argmin = x;
    }
    wmax = std::max(wmax, v);
    return v;
  };
  QuadResult res;
  try {
    res = integrate_ball_fn(b, f, q);
  } catch (const IntegrationError& e) {
    throw IntegrationError(e.what(), b);
  }
  res.min_sample = wmin;
  res.max_sample = wmax;
  res.argmin = argmin;
  return res;
}

QuadResult h_value(const Weight& w, const Ball& b, const QuadratureConfig& q) {
  QuadResult r = integrate_ball(w, b, q);
  r.value /= b.radius;
  r.error_estimate /= b.radius;
  return r;
}

}  // namespace divcap
