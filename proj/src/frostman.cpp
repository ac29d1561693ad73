#include "divcap/frostman.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "divcap/parallel.hpp"

namespace divcap {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Ratio {
  double value = 0.0;
  bool converged = true;
};

template <typename Map>
FrostmanReport frostman_impl(const DiscreteMeasure& mu, const Weight& w, const std::vector<Ball>& balls,
                             const QuadratureConfig& q, Map&& map) {
  FrostmanReport rep;
  rep.total = mu.total();
  rep.samples = balls.size();
  if (mu.empty() || rep.total == 0.0) return rep;
  require_same_dim(w.dim(), mu.dim(), "frostman_constant");
  const auto ratios = map(balls.size(), [&](std::size_t i) {
    const double m = measure_of_ball(mu, balls[i]);
    if (m == 0.0) return Ratio{};
    const auto h = h_value(w, balls[i], q);
    return Ratio{m / h.value, h.converged};
  });
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i].value > rep.C_hat) {
      rep.C_hat = ratios[i].value;
      rep.worst = balls[i];
    }
    if (!ratios[i].converged) ++rep.unconverged;
  }
  if (rep.C_hat > 0.0) rep.lower_bound = rep.total / rep.C_hat;
  return rep;
}

}  // namespace

std::vector<double> dyadic_radii(double r_min, double r_max) {
  if (!(r_min > 0.0 && std::isfinite(r_max) && r_max > 0.0)) throw DomainError("dyadic radii need 0 < r_min, r_max");
  std::vector<double> radii;
  double r = r_min;
  radii.push_back(r);
  while (r < r_max * (1.0 - 1e-12)) {
    r *= 2.0;
    radii.push_back(r);
  }
  return radii;
}

std::vector<Ball> default_ball_sample(const DiscreteMeasure& mu, const BallSampleOptions& opt) {
  if (mu.empty()) return {};
  const int n = mu.dim();
  double r_min = opt.r_min;
  double r_max = opt.r_max;
  // Slightly below the spacing so rounding never admits a neighbour at exactly r.
  if (r_min <= 0.0) r_min = mu.size() > 1 ? mu.min_spacing() * (1.0 - 1e-9) : std::ldexp(1.0, -10);
  if (r_max <= 0.0) r_max = mu.size() > 1 ? mu.diameter() : 1.0;
  if (!(r_min > 0.0)) throw DomainError("ball sample needs distinct atoms");
  r_max = std::max(r_max, r_min);
  const auto radii = dyadic_radii(r_min, r_max);
  std::mt19937_64 rng(opt.seed);
  std::vector<Ball> balls;
  balls.reserve(mu.size() * (radii.size() + static_cast<std::size_t>(std::max(0, opt.off_center))));
  for (const auto& a : mu.atoms()) {
    for (double r : radii) balls.emplace_back(a.x, r);
    for (int j = 0; j < opt.off_center; ++j) {
      const auto idx = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(radii.size()));
      const double r = radii[std::min(idx, radii.size() - 1)];
      Point v(n);
      double len2 = 0.0;
      do {
        len2 = 0.0;
        for (int i = 0; i < n; ++i) {
          v[i] = 2.0 * unit_uniform(rng) - 1.0;
          len2 += v[i] * v[i];
        }
      } while (len2 >= 1.0);
      balls.emplace_back(a.x + r * v, r);
    }
  }
  return balls;
}

FrostmanReport frostman_constant(const DiscreteMeasure& mu, const Weight& w, const std::vector<Ball>& balls,
                                 const QuadratureConfig& q) {
  return frostman_impl(mu, w, balls, q, [](std::size_t n, auto&& f) { return parallel_map<Ratio>(n, f); });
}

FrostmanReport frostman_constant_serial(const DiscreteMeasure& mu, const Weight& w,
                                        const std::vector<Ball>& balls, const QuadratureConfig& q) {
  return frostman_impl(mu, w, balls, q, [](std::size_t n, auto&& f) { return serial_map<Ratio>(n, f); });
}

DualCheck prop_dual_check(const DiscreteMeasure& mu, const Weight& w, const TestFunction& phi,
                          const QuadratureConfig& q) {
  require_same_dim(w.dim(), phi.dim(), "prop_dual_check");
  DualCheck d;
  CompensatedSum s;
  for (const auto& a : mu.atoms()) s.add(a.m * std::abs(phi(a.x)));
  d.lhs = s.value();
  const Integrand f = [&](const Point& x) {
    const double g = norm(phi.gradient(x));
    return g == 0.0 ? 0.0 : g * w.eval_unchecked(x);
  };
  d.rhs = integrate_ball_fn(phi.support(), f, q).value;
  d.ratio = d.rhs > 0.0 ? d.lhs / d.rhs : 0.0;
  return d;
}

}  // namespace divcap
