#include "divcap/content.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <ostream>
#include <sstream>

#include "divcap/parallel.hpp"
#include "divcap/weight_analysis.hpp"

namespace divcap {

std::string to_string(BoundDirection d) { return d == BoundDirection::upper ? "upper" : "lower"; }

Cover canonical_cover(const CantorSpec& spec, std::uint64_t cap) {
  const auto cubes = generate_cubes(spec, cap);
  const double r = std::sqrt(static_cast<double>(spec.dim())) * spec.side(spec.generation()) / 2.0;
  Cover c;
  c.balls.reserve(cubes.size());
  for (const auto& q : cubes) c.balls.emplace_back(q.center(), r);
  c.delta = r;
  std::ostringstream os;
  os << "canonical(n=" << spec.dim() << ",lambda=" << spec.lambda() << ",k=" << spec.generation() << ")";
  c.provenance = os.str();
  return c;
}

Cover aligned_segment_cover(const Point& a, const Point& b, int n_balls) {
  require_same_dim(a.dim(), b.dim(), "aligned_segment_cover");
  if (n_balls < 1) throw DomainError("aligned cover needs at least one ball");
  const double len = distance(a, b);
  if (!(len > 0.0)) throw DomainError("aligned cover needs a segment of positive length");
  Cover c;
  const double r = len / (2.0 * n_balls);
  for (int i = 0; i < n_balls; ++i) {
    const double t = (i + 0.5) / n_balls;
    c.balls.emplace_back(a + t * (b - a), r);
  }
  c.delta = r;
  c.provenance = "aligned_segment(N=" + std::to_string(n_balls) + ")";
  return c;
}

bool covers(const Cover& c, const std::vector<Point>& sample) {
  for (const auto& x : sample) {
    bool hit = false;
    for (const auto& b : c.balls) {
      if (b.contains(x)) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

namespace {

template <typename Map>
ContentEstimate cover_sum_impl(const Weight& w, const Cover& c, const QuadratureConfig& q, Map&& map) {
  for (const auto& b : c.balls) {
    if (b.radius > c.delta * (1.0 + 1e-12)) throw DomainError("cover ball radius exceeds delta");
  }
  const auto parts = map(c.balls.size(), [&](std::size_t i) { return h_value(w, c.balls[i], q); });
  CompensatedSum s;
  ContentEstimate est;
  for (const auto& r : parts) {
    s.add(r.value);
    if (!r.converged) ++est.unconverged;
  }
  est.value = s.value();
  est.delta = c.delta;
  est.provenance = c.provenance;
  return est;
}

}  // namespace

ContentEstimate cover_sum(const Weight& w, const Cover& c, const QuadratureConfig& q) {
  return cover_sum_impl(w, c, q, [](std::size_t n, auto&& f) { return parallel_map<QuadResult>(n, f); });
}

ContentEstimate cover_sum_serial(const Weight& w, const Cover& c, const QuadratureConfig& q) {
  return cover_sum_impl(w, c, q, [](std::size_t n, auto&& f) { return serial_map<QuadResult>(n, f); });
}

std::vector<double> ball_h_values(const Weight& w, const Cover& c, const QuadratureConfig& q) {
  return parallel_map<double>(c.balls.size(), [&](std::size_t i) { return h_value(w, c.balls[i], q).value; });
}

Ball representative_ball(const CantorSpec& spec) {
  const int n = spec.dim();
  const double side = spec.side(spec.generation());
  Point c(n);
  for (int i = 0; i < n; ++i) c[i] = 0.5 * side;
  return Ball(c, std::sqrt(static_cast<double>(n)) * side / 2.0);
}

namespace {

// Grid check, in units of the cube side: on B(center, reach sqrt(n) / 2) the
// nearest corner of the own cube is closer than every sibling cube and than
// anything outside the parent.
bool own_set_nearest(int n, double lambda, double reach) {
  using Key = std::tuple<int, double, double>;
  thread_local std::map<Key, bool> cache;
  const Key key{n, lambda, reach};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double parent = 1.0 / lambda;
  const double outer_gap = (parent - 2.0) * parent;
  const double rho = reach * std::sqrt(static_cast<double>(n)) / 2.0;
  const int m = n <= 2 ? 401 : (n == 3 ? 81 : 31);
  const double h = 2.0 * rho / (m - 1);
  const Point center = Point::from(std::vector<double>(static_cast<std::size_t>(n), 0.5));
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m);
  bool ok = true;
  for (std::size_t idx = 0; idx < total && ok; ++idx) {
    Point x(n);
    std::size_t rem = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = 0.5 - rho + h * static_cast<double>(rem % static_cast<std::size_t>(m));
      rem /= static_cast<std::size_t>(m);
    }
    if (distance(x, center) > rho) continue;
    double own = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::min(std::abs(x[i]), std::abs(x[i] - 1.0));
      own += d * d;
    }
    own = std::sqrt(own);
    double other = outer_gap - distance_to_box(x, Point(n), parent);
    for (int c = 1; c < (1 << n); ++c) {
      Point a(n);
      for (int i = 0; i < n; ++i) a[i] = ((c >> i) & 1) ? parent - 1.0 : 0.0;
      other = std::min(other, distance_to_box(x, a, 1.0));
    }
    ok = own + h * std::sqrt(static_cast<double>(n)) <= other;
  }
  cache.emplace(key, ok);
  return ok;
}

}  // namespace

bool canonical_balls_congruent(const Weight& w, const CantorSpec& spec, double reach) {
  if (!w.congruent_on_cantor_cubes(spec)) return false;
  if (spec.generation() == 0) return true;
  const double rt = std::sqrt(static_cast<double>(spec.dim()));
  if (1.0 / spec.lambda() >= 1.5 + (2.0 * reach + 1.0) * rt / 2.0) return true;
  return own_set_nearest(spec.dim(), spec.lambda(), reach);
}

ContentEstimate canonical_cover_sum(const Weight& w, const CantorSpec& spec, const QuadratureConfig& q,
                                    std::uint64_t cap) {
  if (canonical_balls_congruent(w, spec)) {
    const Ball b = representative_ball(spec);
    const auto r = h_value(w, b, q);
    ContentEstimate est;
    est.value = spec.cube_count(spec.generation()) * r.value;
    est.delta = b.radius;
    est.unconverged = r.converged ? 0 : 1;
    std::ostringstream os;
    os << "canonical-representative(n=" << spec.dim() << ",lambda=" << spec.lambda()
       << ",k=" << spec.generation() << ")";
    est.provenance = os.str();
    return est;
  }
  return cover_sum(w, canonical_cover(spec, cap), q);
}

Cover greedy_cover(const Weight& w, const std::vector<Point>& sample, double delta,
                   const QuadratureConfig& q, const GreedyOptions& opt) {
  if (sample.empty()) throw DomainError("greedy cover needs a nonempty sample");
  if (!(delta > 0.0) || std::isinf(delta)) throw DomainError("greedy cover needs a finite delta > 0");
  constexpr int kMenu = 4;
  std::vector<Ball> candidates;
  candidates.reserve(sample.size() * kMenu + opt.extra_candidates.size());
  for (const auto& x : sample) {
    for (int j = 0; j < kMenu; ++j) candidates.emplace_back(x, delta * std::ldexp(1.0, -j));
  }
  for (const auto& b : opt.extra_candidates) {
    if (b.radius <= delta * (1.0 + 1e-12)) candidates.push_back(b);
  }
  const auto h = parallel_map<double>(candidates.size(), [&](std::size_t i) {
    return h_value(w, candidates[i], q).value;
  });
  // Sample indices inside each candidate, computed once.
  const auto members = parallel_map<std::vector<std::uint32_t>>(candidates.size(), [&](std::size_t i) {
    std::vector<std::uint32_t> m;
    for (std::size_t k = 0; k < sample.size(); ++k) {
      if (candidates[i].contains(sample[k])) m.push_back(static_cast<std::uint32_t>(k));
    }
    return m;
  });

  Cover cover;
  cover.delta = delta;
  cover.provenance = "greedy";
  std::vector<char> covered(sample.size(), 0);
  std::size_t remaining = sample.size();
  std::size_t picks = 0;
  while (remaining > 0 && picks < opt.budget) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::size_t fresh = 0;
      for (auto k : members[i]) fresh += covered[k] ? 0 : 1;
      if (fresh == 0) continue;
      const double score = h[i] / static_cast<double>(fresh);
      if (score < best) {
        best = score;
        arg = i;
      }
    }
    if (arg == candidates.size()) break;
    cover.balls.push_back(candidates[arg]);
    for (auto k : members[arg]) {
      if (!covered[k]) {
        covered[k] = 1;
        --remaining;
      }
    }
    ++picks;
  }
  if (remaining > 0) {
    cover.budget_exhausted = true;
    cover.provenance = "greedy(budget exhausted, per-point fallback)";
    const double r = delta * std::ldexp(1.0, -(kMenu - 1));
    for (std::size_t k = 0; k < sample.size(); ++k) {
      if (!covered[k]) cover.balls.emplace_back(sample[k], r);
    }
  }
  return cover;
}

DecayPrediction cantor_decay_exponent(int n, double gamma, double s) {
  require_dim(n);
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in [0, 1)");
  if (!(s > 0.0 && s < n)) throw DomainError("s must lie in (0, n)");
  const double nn = n;
  DecayPrediction d;
  d.exponent = (1.0 - gamma) * nn * nn / s - nn / s + (gamma - 1.0) * nn;
  d.threshold = nn - 1.0 / (1.0 - gamma);
  d.removable_predicted = s < d.threshold;
  return d;
}

std::optional<double> fit_decay_exponent(const std::vector<int>& k, const std::vector<double>& v) {
  if (k.size() != v.size()) throw DomainError("fit_decay_exponent: size mismatch");
  if (k.size() < 2) return std::nullopt;
  const std::size_t start = k.size() / 2 == k.size() - 1 ? k.size() - 2 : k.size() / 2;
  std::vector<double> x, y;
  for (std::size_t i = start; i < k.size(); ++i) {
    if (!(v[i] > 0.0)) return std::nullopt;
    x.push_back(k[i]);
    y.push_back(std::log2(v[i]));
  }
  return -fit_slope(x, y);
}

ContentCurve content_upper_curve(const Weight& w, const CantorSpec& spec, const std::vector<int>& k_range,
                                 const QuadratureConfig& q, std::uint64_t cap) {
  if (k_range.empty()) throw DomainError("content curve needs at least one generation");
  for (std::size_t i = 1; i < k_range.size(); ++i) {
    if (k_range[i] <= k_range[i - 1]) throw DomainError("content curve generations must increase");
  }
  for (int k : k_range) {
    const auto sk = spec.at_generation(k);
    if (!canonical_balls_congruent(w, sk) && static_cast<std::uint64_t>(sk.cube_count(k)) > cap) {
      throw DomainError("generation " + std::to_string(k) + " exceeds the enumeration cap");
    }
  }
  ContentCurve curve;
  std::vector<double> values;
  for (int k : k_range) {
    curve.points.push_back({k, canonical_cover_sum(w, spec.at_generation(k), q, cap)});
    values.push_back(curve.points.back().estimate.value);
  }
  curve.exponent = fit_decay_exponent(k_range, values);
  return curve;
}

void write_cover_csv(std::ostream& os, const Cover& c, const std::vector<double>& h) {
  const int n = c.balls.empty() ? 0 : c.balls.front().dim();
  for (int i = 0; i < n; ++i) os << "x" << i << ",";
  os << "radius,h\n";
  os.precision(17);
  for (std::size_t j = 0; j < c.balls.size(); ++j) {
    for (int i = 0; i < n; ++i) os << c.balls[j].center[i] << ",";
    os << c.balls[j].radius << "," << (j < h.size() ? h[j] : std::nan("")) << "\n";
  }
}

void write_curve_csv(std::ostream& os, const ContentCurve& curve) {
  os << "k,sum,delta,fitted_exponent\n";
  os.precision(17);
  for (const auto& p : curve.points) {
    os << p.k << "," << p.estimate.value << "," << p.estimate.delta << ",";
    if (curve.exponent) os << *curve.exponent;
    os << "\n";
  }
}

}  // namespace divcap
