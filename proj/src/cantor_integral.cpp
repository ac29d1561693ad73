#include "divcap/cantor_integral.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "divcap/fractal.hpp"

namespace divcap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool fold(const Weight& w, CantorForm& f, bool& have) {
  return std::visit(Overloaded{
                        [&](const ConstantWeight& c) {
                          f.coef *= c.c;
                          return true;
                        },
                        [](const RadialPowerWeight&) { return false; },
                        [&](const DistPowerWeight& d) {
                          if (d.alpha == 0.0) return true;
                          if (d.set.generation) return false;
                          if (have && (d.set.n != f.n || d.set.lambda != f.lambda)) return false;
                          have = true;
                          f.n = d.set.n;
                          f.lambda = d.set.lambda;
                          f.alpha += d.alpha;
                          return true;
                        },
                        [&](const ProductWeight& p) {
                          for (const auto& x : p.factors) {
                            if (!fold(x, f, have)) return false;
                          }
                          return true;
                        },
                    },
                    w.kind());
}

double min_dist2(const Point& c, const Point& lo, const Point& hi) {
  double s = 0.0;
  for (int i = 0; i < c.dim(); ++i) {
    const double d = c[i] < lo[i] ? lo[i] - c[i] : (c[i] > hi[i] ? c[i] - hi[i] : 0.0);
    s += d * d;
  }
  return s;
}

double max_dist2(const Point& c, const Point& lo, const Point& hi) {
  double s = 0.0;
  for (int i = 0; i < c.dim(); ++i) {
    const double d = std::max(std::abs(c[i] - lo[i]), std::abs(c[i] - hi[i]));
    s += d * d;
  }
  return s;
}

int pow3(int n) {
  int p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return p;
}

// Gap boxes of [0,1]^n (the 3^n grid cut at lambda and 1 - lambda, minus the
// 2^n corner cells) and their integrals.
struct GapData {
  std::vector<Box> boxes;
  std::vector<double> integral;
  double I0 = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

const GapData& gap_data(const CantorForm& f, const QuadratureConfig& q) {
  using Key = std::tuple<int, double, double, double, int, std::size_t>;
  thread_local std::map<Key, GapData> cache;
  const Key key{f.n, f.lambda, f.alpha, q.rel_tol, q.base_subdivisions, q.max_evals};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  GapData g;
  const int n = f.n;
  const double cuts[4] = {0.0, f.lambda, 1.0 - f.lambda, 1.0};
  QuadratureConfig fine = q;
  fine.rel_tol = 0.1 * q.rel_tol;
  const Integrand w = [&](const Point& x) { return std::pow(dist_to_limit_set(n, f.lambda, x), f.alpha); };
  double gap_sum = 0.0;
  for (int code = 0; code < pow3(n); ++code) {
    Point lo(n), hi(n);
    bool corner = true;
    int rem = code;
    for (int i = 0; i < n; ++i) {
      const int d = rem % 3;
      rem /= 3;
      corner = corner && d != 1;
      lo[i] = cuts[d];
      hi[i] = cuts[d + 1];
    }
    if (corner) continue;
    const auto r = integrate_box_fn(Box(lo, hi), w, fine);
    g.boxes.emplace_back(lo, hi);
    g.integral.push_back(r.value);
    g.err += r.error_estimate;
    g.evals += r.evals;
    g.converged = g.converged && r.converged;
    gap_sum += r.value;
  }
  const double ratio = std::ldexp(1.0, n) * std::pow(f.lambda, n + f.alpha);
  if (!(ratio < 1.0)) throw IntegrationError("distance exponent is not integrable on the Cantor set");
  g.I0 = gap_sum / (1.0 - ratio);
  g.err /= 1.0 - ratio;
  return cache.emplace(key, std::move(g)).first->second;
}

struct Acc {
  double value = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

class Integrator {
 public:
  Integrator(const CantorForm& f, const Ball& b, const QuadratureConfig& q)
      : f_(f), b_(b), q_(q), gap_(gap_data(f, q)), r2_(b.radius * b.radius), argmin_(b.center) {
    w_ = [this](const Point& x) {
      const double v = std::pow(dist_to_limit_set(f_.n, f_.lambda, x), f_.alpha);
      if (v < wmin_) {
        wmin_ = v;
        argmin_ = x;
      }
      wmax_ = std::max(wmax_, v);
      return v;
    };
    const double logl = std::log(f.lambda);
    const double jb = std::max(0.0, std::floor(std::log(b.radius) / logl));
    cut_mass_ = 1e-3 * q.rel_tol * gap_.I0 * std::exp(jb * (f.n + f.alpha) * logl);
  }

  QuadResult run() {
    exterior();
    cube(Point(f_.n), 0);
    probe();
    QuadResult res;
    res.value = f_.coef * acc_.value;
    res.error_estimate = f_.coef * (acc_.err + gap_.err * acc_.value / std::max(gap_.I0, 1e-300));
    res.evals = acc_.evals;
    res.converged = acc_.converged && gap_.converged;
    res.min_sample = f_.coef * wmin_;
    res.max_sample = f_.coef * wmax_;
    res.argmin = argmin_;
    return res;
  }

 private:
  void box_part(const Point& lo, const Point& hi) {
    if (min_dist2(b_.center, lo, hi) >= r2_) return;
    const auto r = integrate_box_ball_fn(Box(lo, hi), b_, w_, q_);
    acc_.value += r.value;
    acc_.err += r.error_estimate;
    acc_.evals += r.evals;
    acc_.converged = acc_.converged && r.converged;
  }

  // Part of B outside [0,1]^n, split along the cube's faces.
  void exterior() {
    const int n = f_.n;
    for (int code = 0; code < pow3(n); ++code) {
      Point lo(n), hi(n);
      bool inside = true, empty = false;
      int rem = code;
      for (int i = 0; i < n; ++i) {
        const int d = rem % 3;
        rem /= 3;
        const double a = b_.center[i] - b_.radius, c = b_.center[i] + b_.radius;
        if (d == 0) {
          lo[i] = a;
          hi[i] = std::min(c, 0.0);
        } else if (d == 1) {
          lo[i] = std::max(a, 0.0);
          hi[i] = std::min(c, 1.0);
        } else {
          lo[i] = std::max(a, 1.0);
          hi[i] = c;
        }
        inside = inside && d == 1;
        empty = empty || !(hi[i] > lo[i]);
      }
      if (!inside && !empty) box_part(lo, hi);
    }
  }

  void cube(const Point& anchor, int level) {
    const int n = f_.n;
    const double side = std::pow(f_.lambda, level);
    Point top = anchor;
    for (int i = 0; i < n; ++i) top[i] += side;
    if (min_dist2(b_.center, anchor, top) >= r2_) return;
    const double scale = std::exp(level * (n + f_.alpha) * std::log(f_.lambda));
    if (max_dist2(b_.center, anchor, top) <= r2_) {
      acc_.value += scale * gap_.I0;
      return;
    }
    if (scale * gap_.I0 <= cut_mass_ || level >= 400) {
      const double frac = inside_fraction(anchor, side);
      acc_.value += frac * scale * gap_.I0;
      acc_.err += std::min(frac, 1.0 - frac) * scale * gap_.I0;
      return;
    }
    for (std::size_t g = 0; g < gap_.boxes.size(); ++g) {
      Point lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        lo[i] = anchor[i] + side * gap_.boxes[g].lo[i];
        hi[i] = anchor[i] + side * gap_.boxes[g].hi[i];
      }
      if (min_dist2(b_.center, lo, hi) >= r2_) continue;
      if (max_dist2(b_.center, lo, hi) <= r2_) {
        acc_.value += scale * gap_.integral[g];
        continue;
      }
      box_part(lo, hi);
    }
    const double shift = side * (1.0 - f_.lambda);
    for (int c = 0; c < (1 << n); ++c) {
      Point a = anchor;
      for (int i = 0; i < n; ++i) {
        if ((c >> i) & 1) a[i] += shift;
      }
      cube(a, level + 1);
    }
  }

  double inside_fraction(const Point& anchor, double side) const {
    const int n = f_.n;
    constexpr int m = 4;
    int total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    int in = 0;
    for (int idx = 0; idx < total; ++idx) {
      Point x = anchor;
      int rem = idx;
      for (int i = 0; i < n; ++i) {
        x[i] += side * ((rem % m) + 0.5) / m;
        rem /= m;
      }
      if (b_.contains(x)) ++in;
    }
    return static_cast<double>(in) / total;
  }

  // Extra samples for the extremes of w over B.
  void probe() {
    const int n = f_.n;
    constexpr int m = 5;
    int total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    w_(b_.center);
    for (int idx = 0; idx < total; ++idx) {
      Point x = b_.center;
      int rem = idx;
      for (int i = 0; i < n; ++i) {
        x[i] += b_.radius * (2.0 * (rem % m) + 1.0 - m) / m;
        rem /= m;
      }
      if (b_.contains(x)) w_(x);
    }
  }

  CantorForm f_;
  Ball b_;
  const QuadratureConfig& q_;
  const GapData& gap_;
  double r2_;
  double cut_mass_ = 0.0;
  Integrand w_;
  Acc acc_;
  double wmin_ = std::numeric_limits<double>::infinity();
  double wmax_ = 0.0;
  Point argmin_;
};

}  // namespace

std::optional<CantorForm> cantor_form(const Weight& w) {
  CantorForm f;
  f.n = w.dim();
  bool have = false;
  if (!fold(w, f, have) || !have || f.alpha == 0.0) return std::nullopt;
  return f;
}

bool cantor_self_similar(int n, double lambda) {
  return lambda <= 1.0 / (2.0 + 0.5 * std::sqrt(static_cast<double>(n)));
}

QuadResult cantor_ball_integral(const CantorForm& f, const Ball& b, const QuadratureConfig& q) {
  require_same_dim(f.n, b.dim(), "cantor_ball_integral");
  if (!cantor_self_similar(f.n, f.lambda)) throw DomainError("Cantor ratio too large for the self-similar split");
  q.validate();
  return Integrator(f, b, q).run();
}

}  // namespace divcap
