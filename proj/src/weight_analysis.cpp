#include "divcap/weight_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "divcap/parallel.hpp"

namespace divcap {

namespace {

constexpr std::array<int, 5> kPrimes{2, 3, 5, 7, 11};
constexpr double kInf = std::numeric_limits<double>::infinity();

double ball_volume(const Ball& b) { return unit_ball_volume(b.dim()) * std::pow(b.radius, b.dim()); }

template <typename Map>
DoublingEstimate doubling_impl(const Weight& w, const Box& region, std::size_t n_samples,
                               const QuadratureConfig& q, Map&& map) {
  require_same_dim(w.dim(), region.dim(), "estimate_doubling");
  if (n_samples < 1) throw DomainError("estimate_doubling needs at least one sample");
  const auto balls = halton_balls(region, n_samples);
  struct Sample {
    double ratio;
    bool converged;
  };
  const auto samples = map(balls.size(), [&](std::size_t i) {
    const auto inner = integrate_ball(w, balls[i], q);
    const auto outer = integrate_ball(w, Ball(balls[i].center, 2.0 * balls[i].radius), q);
    return Sample{outer.value / inner.value, inner.converged && outer.converged};
  });
  DoublingEstimate est;
  est.region = region;
  est.samples = n_samples;
  est.worst = balls.front();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].ratio > est.C_D) {
      est.C_D = samples[i].ratio;
      est.worst = balls[i];
    }
    if (!samples[i].converged) ++est.unconverged;
  }
  est.s_D = std::log2(est.C_D);
  return est;
}

// Smallest weight value found by zooming about `start` inside the ball.
// history[L] is the minimum after L zoom steps.
std::vector<double> zoom_minimum(const Weight& w, const Ball& b, Point start, double start_value,
                                 int levels) {
  const int n = b.dim();
  constexpr int kGrid = 5;
  int points = 1;
  for (int i = 0; i < n; ++i) points *= kGrid;
  std::vector<double> history{start_value};
  double best = start_value;
  Point arg = start;
  for (int level = 1; level <= levels; ++level) {
    const double half = b.radius * std::ldexp(1.0, -level);
    const Point centre = arg;
    for (int idx = 0; idx < points; ++idx) {
      int rem = idx;
      Point x = centre;
      for (int i = 0; i < n; ++i) {
        const int k = rem % kGrid;
        rem /= kGrid;
        x[i] += half * (2.0 * k / (kGrid - 1) - 1.0);
      }
      if (!b.contains(x)) continue;
      const double v = w.eval_unchecked(x);
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    history.push_back(best);
  }
  return history;
}

}  // namespace

double radical_inverse(std::uint64_t i, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (i > 0) {
    result += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

std::vector<Ball> halton_balls(const Box& region, std::size_t count) {
  const int n = region.dim();
  const double diam = region.diameter();
  std::vector<Ball> balls;
  balls.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    Point c(n);
    for (int j = 0; j < n; ++j) c[j] = region.lo[j] + region.extent(j) * radical_inverse(i, kPrimes[j]);
    const double t = radical_inverse(i, kPrimes[static_cast<std::size_t>(n)]);
    balls.emplace_back(c, diam * std::pow(10.0, -3.0 * (1.0 - t)));
  }
  return balls;
}

double doubling_ratio(const Weight& w, const Ball& b, const QuadratureConfig& q) {
  return integrate_ball(w, Ball(b.center, 2.0 * b.radius), q).value / integrate_ball(w, b, q).value;
}

DoublingEstimate estimate_doubling(const Weight& w, const Box& region, std::size_t n_samples,
                                   const QuadratureConfig& q) {
  return doubling_impl(w, region, n_samples, q, [](std::size_t n, auto&& f) {
    return parallel_map<std::decay_t<decltype(f(0))>>(n, f);
  });
}

DoublingEstimate estimate_doubling_serial(const Weight& w, const Box& region,
                                          std::size_t n_samples, const QuadratureConfig& q) {
  return doubling_impl(w, region, n_samples, q, [](std::size_t n, auto&& f) {
    return serial_map<std::decay_t<decltype(f(0))>>(n, f);
  });
}

double ap_product(const Weight& w, double p, const Ball& b, const QuadratureConfig& q,
                  const ApOptions& opt, double* previous) {
  if (!(p >= 1.0)) throw DomainError("A_p needs p >= 1");
  const double vol = ball_volume(b);
  const auto iw = integrate_ball(w, b, q);
  const double avg = iw.value / vol;
  if (p == 1.0) {
    std::vector<double> history{iw.min_sample};
    if (!iw.closed_form && iw.min_sample > 0.0) {
      history = zoom_minimum(w, b, iw.argmin, iw.min_sample, opt.zoom_levels);
    }
    const auto product = [&](double m) { return m > 0.0 ? avg / m : kInf; };
    const double last = product(history.back());
    if (previous) *previous = history.size() > 1 ? product(history[history.size() - 2]) : last;
    return last;
  }
  // w^{1/(1-p)} may fail to be locally integrable, which makes the product infinite.
  const auto dual_product = [&](const QuadratureConfig& cfg) {
    try {
      const Weight dual = w.pow(1.0 / (1.0 - p));
      const double avg_dual = integrate_ball(dual, b, cfg).value / vol;
      const double avg_w = integrate_ball(w, b, cfg).value / vol;
      return avg_w * std::pow(avg_dual, p - 1.0);
    } catch (const DomainError&) {
      return kInf;
    } catch (const IntegrationError&) {
      return kInf;
    }
  };
  const double value = dual_product(q);
  if (previous) {
    QuadratureConfig coarse = q;
    coarse.rel_tol = std::min(0.5, q.rel_tol * 10.0);
    coarse.max_evals = std::max<std::size_t>(1, q.max_evals / 4);
    *previous = dual_product(coarse);
  }
  return value;
}

ApEstimate estimate_Ap_on(const Weight& w, double p, const std::vector<Ball>& balls,
                          const QuadratureConfig& q, const ApOptions& opt) {
  if (balls.empty()) throw DomainError("estimate_Ap needs at least one ball");
  struct Sample {
    double product;
    double previous;
  };
  const auto samples = parallel_map<Sample>(balls.size(), [&](std::size_t i) {
    Sample s{};
    s.product = ap_product(w, p, balls[i], q, opt, &s.previous);
    return s;
  });
  ApEstimate est;
  est.samples = balls.size();
  est.worst = balls.front();
  double best = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (std::isinf(s.product) || (s.product > opt.blowup_threshold && s.product > s.previous)) {
      est.infinite = true;
    }
    if (s.product > best) {
      best = s.product;
      est.worst = balls[i];
    }
  }
  est.constant = est.infinite ? kInf : std::max(1.0, best);
  return est;
}

ApEstimate estimate_Ap(const Weight& w, double p, const Box& region, std::size_t n_samples,
                       const QuadratureConfig& q, const ApOptions& opt) {
  require_same_dim(w.dim(), region.dim(), "estimate_Ap");
  return estimate_Ap_on(w, p, halton_balls(region, n_samples), q, opt);
}

std::string to_string(GrowthTrend t) {
  switch (t) {
    case GrowthTrend::diverging: return "diverging";
    case GrowthTrend::bounded: return "bounded";
    default: return "undecided";
  }
}

std::vector<double> log_spaced(double r0, double r1, int count) {
  if (!(r0 > 0.0 && r1 >= r0) || count < 1) throw DomainError("log_spaced needs 0 < r0 <= r1, count >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(r0 * std::pow(r1 / r0, t));
  }
  out.back() = r1;
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_slope needs two or more points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

GrowthReport check_growth(const Weight& w, const Point& x, const std::vector<double>& radii,
                          const QuadratureConfig& q, double slope_margin) {
  require_same_dim(w.dim(), x.dim(), "check_growth");
  if (radii.size() < 2) throw DomainError("check_growth needs at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw DomainError("check_growth radii must be increasing");
  }
  if (radii.back() < 100.0 * radii.front()) throw DomainError("check_growth radii must span two decades");
  GrowthReport rep;
  rep.radii = radii;
  rep.h = parallel_map<double>(radii.size(), [&](std::size_t i) {
    return h_value(w, Ball(x, radii[i]), q).value;
  });
  std::vector<double> lx, ly;
  const double floor_r = radii.back() / 10.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] >= floor_r * (1.0 - 1e-12)) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(rep.h[i]));
    }
  }
  if (lx.size() < 2) {
    lx = {std::log(radii[radii.size() - 2]), std::log(radii.back())};
    ly = {std::log(rep.h[radii.size() - 2]), std::log(rep.h.back())};
  }
  rep.slope = fit_slope(lx, ly);
  if (rep.slope > slope_margin) {
    rep.trend = GrowthTrend::diverging;
  } else if (std::abs(rep.slope) <= slope_margin) {
    rep.trend = GrowthTrend::bounded;
  } else {
    rep.trend = GrowthTrend::undecided;
  }
  return rep;
}

}  // namespace divcap
