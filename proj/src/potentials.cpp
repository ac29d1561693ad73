#include "divcap/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "divcap/cantor_integral.hpp"
#include "divcap/parallel.hpp"

namespace divcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x is the evaluation point; for shell evaluations `own` is the atom the
// shell surrounds and d = x - atom computed without cancellation.
using AtomIntegrand = std::function<double(const Point& x, int own, const Point& d)>;

double min_spacing(const std::vector<Point>& pts) {
  double best = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, distance(pts[i], pts[j]));
  }
  return best;
}

std::vector<Point> atom_points(const DiscreteMeasure& mu) {
  std::vector<Point> pts;
  pts.reserve(mu.size());
  for (const auto& a : mu.atoms()) pts.push_back(a.x);
  return pts;
}

// 1 on [0, 1/2], 0 beyond 1, C^2 in between.
double near_cutoff(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double s = 2.0 * t - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Main part F (1 - sum psi_a) over the region (split into a ball and an
// annulus at `split` if 0 < split < radius); the rest by dyadic shells.
SingularResult integrate_with_shells(const Ball& region, const std::vector<Point>& atoms, const AtomIntegrand& F,
                                     const std::function<bool(const Point&)>& inside, const ShellConfig& cfg,
                                     double split = 0.0) {
  const int n = region.dim();
  SingularResult res;
  const double rho0 = cfg.near_fraction * std::min(min_spacing(atoms), region.radius);
  std::vector<int> active;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (distance(atoms[i], region.center) < region.radius + rho0) active.push_back(static_cast<int>(i));
  }
  const Integrand main_f = [&](const Point& x) {
    if (inside && !inside(x)) return 0.0;
    double keep = 1.0;
    for (int i : active) {
      const double r = distance(x, atoms[static_cast<std::size_t>(i)]);
      if (r < rho0) keep -= near_cutoff(r / rho0);
    }
    if (keep <= 0.0) return 0.0;
    return keep * F(x, -1, x);
  };
  std::vector<QuadResult> parts;
  if (split > 0.0 && split < region.radius) {
    parts.push_back(integrate_ball_fn(Ball(region.center, split), main_f, cfg.q));
    parts.push_back(integrate_annulus(region.center, split, region.radius, main_f, cfg.q));
  } else {
    parts.push_back(integrate_ball_fn(region, main_f, cfg.q));
  }
  double total = 0.0;
  for (const auto& m : parts) {
    res.evals += m.evals;
    res.converged = res.converged && m.converged;
    total += m.value;
  }
  if (active.empty()) {
    res.value = total;
    return res;
  }
  const Point origin(n);
  for (int j = 0; j < cfg.max_shells; ++j) {
    const double r1 = rho0 * std::ldexp(1.0, -j);
    const double r0 = 0.5 * r1;
    double s = 0.0;
    for (int i : active) {
      const Point& a = atoms[static_cast<std::size_t>(i)];
      const Integrand f = [&](const Point& d) {
        const Point x = a + d;
        if (inside && !inside(x)) return 0.0;
        if (j == 0) {
          const double c = near_cutoff(norm(d) / rho0);
          return c == 0.0 ? 0.0 : c * F(x, i, d);
        }
        return F(x, i, d);
      };
      const auto r = integrate_annulus(origin, r0, r1, f, cfg.q);
      res.evals += r.evals;
      if (!r.converged) res.converged = false;
      s += r.value;
    }
    res.shells.push_back(s);
    total += s;
    const std::size_t k = res.shells.size();
    if (k < 3) continue;
    const double a0 = std::abs(res.shells[k - 3]), a1 = std::abs(res.shells[k - 2]), a2 = std::abs(res.shells[k - 1]);
    if (a2 > 0.0 && a2 >= a1 && a1 >= a0) {
      res.diverging = true;
      res.value = kInf;
      return res;
    }
    if (a2 == 0.0 && a1 == 0.0) break;
    const double q = res.shells[k - 1] / res.shells[k - 2];
    if (std::abs(q) < 1.0) {
      const double tail = res.shells[k - 1] * q / (1.0 - q);
      if (std::abs(tail) <= cfg.shell_tol * std::abs(total)) {
        total += tail;
        res.value = total;
        return res;
      }
    }
  }
  if (res.shells.size() >= static_cast<std::size_t>(cfg.max_shells)) res.converged = false;
  res.value = total;
  return res;
}

double kernel(double r, int n) { return n == 1 ? 1.0 : std::pow(r, 1.0 - n); }

// Newtonian field with the own-atom term taken from the offset.
Point field_with_offset(const DiscreteMeasure& mu, const Point& x, int own, const Point& d) {
  const int n = x.dim();
  Point v(n);
  const auto& atoms = mu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Point dx = static_cast<int>(i) == own ? d : x - atoms[i].x;
    const double r = norm(dx);
    if (r == 0.0) throw DomainError("field evaluated at an atom");
    v += dx * (atoms[i].m / std::pow(r, n));
  }
  return v * newton_constant(n);
}

std::vector<Point> probe_directions(int n) {
  std::vector<Point> dirs;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Point d(n);
    int rem = code;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      d[i] = static_cast<double>(rem % 3) - 1.0;
      rem /= 3;
      if (d[i] != 0.0) zero = false;
    }
    if (zero) continue;
    dirs.push_back(d * (1.0 / norm(d)));
  }
  return dirs;
}

}  // namespace

double riesz_potential(const DiscreteMeasure& mu, const Point& x, double R) {
  CompensatedSum s;
  for (const auto& a : mu.atoms()) {
    require_same_dim(a.x.dim(), x.dim(), "riesz_potential");
    const double r = distance(x, a.x);
    if (!(r < R)) continue;
    if (r == 0.0 && x.dim() >= 2) return kInf;
    s.add(a.m * kernel(r, x.dim()));
  }
  return s.value();
}

double newton_constant(int n) { return 1.0 / unit_sphere_area(n); }

Point div_field_eval(const DiscreteMeasure& mu, const Point& x) {
  if (!mu.empty()) require_same_dim(mu.dim(), x.dim(), "div_field_eval");
  return field_with_offset(mu, x, -1, x);
}

SingularResult riesz_energy(const DiscreteMeasure& mu, const Weight& w, double p, double R, const ShellConfig& cfg) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("riesz_energy needs 1 < p < inf");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("riesz_energy needs a finite R > 0");
  if (mu.empty() || mu.total() == 0.0) return {};
  const int n = mu.dim();
  require_same_dim(w.dim(), n, "riesz_energy");
  for (const auto& a : mu.atoms()) {
    if (!(norm(a.x) < R)) throw DomainError("riesz_energy needs supp mu inside B(0, R)");
  }
  const double R3 = 3.0 * R;
  const auto& atoms = mu.atoms();
  const AtomIntegrand F = [&](const Point& x, int own, const Point& d) {
    double I = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double r = static_cast<int>(i) == own ? norm(d) : distance(x, atoms[i].x);
      if (r < R3) I += atoms[i].m * kernel(r, n);
    }
    if (I == 0.0) return 0.0;
    const double wx = w.eval_unchecked(x);
    if (std::isinf(wx)) return 0.0;
    return std::pow(I, p) / wx;
  };
  return integrate_with_shells(Ball(Point(n), R3 * 1.01), atom_points(mu), F, {}, cfg, R3);
}

DivergenceCheck verify_divergence(const DiscreteMeasure& mu, const TestFunction& phi, const ShellConfig& cfg) {
  DivergenceCheck chk;
  if (mu.empty()) return chk;
  require_same_dim(mu.dim(), phi.dim(), "verify_divergence");
  CompensatedSum rhs;
  for (const auto& a : mu.atoms()) rhs.add(a.m * phi(a.x));
  chk.rhs = rhs.value();
  const AtomIntegrand F = [&](const Point& x, int own, const Point& d) {
    const Point g = phi.gradient(x);
    if (norm2(g) == 0.0) return 0.0;
    return -dot(field_with_offset(mu, x, own, d), g);
  };
  const auto r = integrate_with_shells(phi.support(), atom_points(mu), F, {}, cfg);
  chk.lhs = r.value;
  chk.evals = r.evals;
  chk.converged = r.converged;
  chk.residual = std::abs(chk.lhs - chk.rhs) / std::max(1.0, std::abs(chk.rhs));
  return chk;
}

VectorFieldSpec VectorFieldSpec::riesz_of_measure(DiscreteMeasure mu, int n) {
  require_dim(n);
  if (!mu.empty()) require_same_dim(mu.dim(), n, "riesz_of_measure");
  VectorFieldSpec v;
  v.kind_ = Kind::riesz_of_measure;
  v.n_ = n;
  v.mu_ = std::move(mu);
  return v;
}

VectorFieldSpec VectorFieldSpec::grid_sampled(std::vector<GridField> components) {
  if (components.empty()) throw DomainError("grid-sampled field needs components");
  const int n = components.front().dim();
  if (static_cast<int>(components.size()) != n) throw DomainError("grid-sampled field needs one component per axis");
  VectorFieldSpec v;
  v.kind_ = Kind::grid_sampled;
  v.n_ = n;
  v.comps_ = std::move(components);
  return v;
}

Point VectorFieldSpec::operator()(const Point& x) const {
  if (kind_ == Kind::riesz_of_measure) return mu_.empty() ? Point(n_) : div_field_eval(mu_, x);
  Point v(n_);
  for (int i = 0; i < n_; ++i) v[i] = comps_[static_cast<std::size_t>(i)].interpolate(x);
  return v;
}

SingularResult weighted_norm(const VectorFieldSpec& v, const Weight& w, double p, const Box& domain,
                             const ShellConfig& cfg) {
  require_same_dim(v.dim(), domain.dim(), "weighted_norm");
  require_same_dim(w.dim(), domain.dim(), "weighted_norm");
  if (!(p > 1.0)) throw DomainError("weighted_norm needs p > 1 or p = inf");
  const int n = v.dim();
  SingularResult res;
  const bool riesz = v.kind() == VectorFieldSpec::Kind::riesz_of_measure;
  if (riesz && v.measure().empty()) return res;
  const auto ratio = [&](const Point& x, const Point& f) {
    const double wx = w.eval_unchecked(x);
    if (std::isinf(wx)) return 0.0;
    return norm(f) / wx;
  };
  if (std::isinf(p)) {
    GridField grid(domain, cfg.grid_resolution);
    const auto vals = parallel_map<double>(grid.node_count(), [&](std::size_t i) {
      const Point x = grid.node(i);
      if (riesz) {
        for (const auto& a : v.measure().atoms()) {
          if (a.x == x) return 0.0;
        }
      }
      return ratio(x, v(x));
    });
    double best = 0.0;
    for (double x : vals) best = std::max(best, x);
    if (riesz) {
      const auto pts = atom_points(v.measure());
      const double rho0 = cfg.near_fraction * std::min(min_spacing(pts), 0.5 * domain.diameter());
      const auto dirs = probe_directions(n);
      constexpr int kLevels = 40;
      std::vector<double> level(kLevels, 0.0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!domain.contains(pts[i])) continue;
        for (int j = 0; j < kLevels; ++j) {
          const double rho = rho0 * std::ldexp(1.0, -j);
          for (const auto& d : dirs) {
            const Point off = d * rho;
            const Point x = pts[i] + off;
            if (!domain.contains(x)) continue;
            const double val = ratio(x, field_with_offset(v.measure(), x, static_cast<int>(i), off));
            level[static_cast<std::size_t>(j)] = std::max(level[static_cast<std::size_t>(j)], val);
          }
        }
      }
      res.shells = level;
      for (double x : level) best = std::max(best, x);
      const double a0 = level[kLevels - 3], a1 = level[kLevels - 2], a2 = level[kLevels - 1];
      if (a2 > 1.01 * a1 && a1 > 1.01 * a0) res.diverging = true;
    }
    res.value = res.diverging ? kInf : best;
    return res;
  }
  if (!riesz) {
    const Integrand f = [&](const Point& x) {
      const Point fx = v(x);
      return std::pow(ratio(x, fx) * w.eval_unchecked(x), p) / w.eval_unchecked(x);
    };
    const auto r = integrate_box_fn(domain, f, cfg.q);
    res.value = std::pow(r.value, 1.0 / p);
    res.converged = r.converged;
    res.evals = r.evals;
    return res;
  }
  const AtomIntegrand F = [&](const Point& x, int own, const Point& d) {
    const double wx = w.eval_unchecked(x);
    if (std::isinf(wx)) return 0.0;
    return std::pow(norm(field_with_offset(v.measure(), x, own, d)), p) / wx;
  };
  const Ball region(domain.center(), 0.5 * domain.diameter() * (1.0 + 1e-9));
  res = integrate_with_shells(region, atom_points(v.measure()), F,
                              [&](const Point& x) { return domain.contains(x); }, cfg);
  if (!res.diverging) res.value = std::pow(res.value, 1.0 / p);
  return res;
}

double witness_value(const Cover& c, const Point& x) {
  double chi = 0.0;
  for (const auto& b : c.balls) {
    chi = std::max(chi, std::clamp((2.0 * b.radius - distance(x, b.center)) / b.radius, 0.0, 1.0));
  }
  return chi;
}

namespace {

// int over the annulus r <= |x - c| < 2r of w
double annulus_integral(const Weight& w, const Ball& b, const QuadratureConfig& q) {
  const auto form = cantor_form(w);
  if (w.radial_form_about(b.center) || (form && cantor_self_similar(form->n, form->lambda))) {
    return integrate_ball(w, Ball(b.center, 2.0 * b.radius), q).value - integrate_ball(w, b, q).value;
  }
  const Integrand f = [&](const Point& x) { return w.eval_unchecked(x); };
  try {
    return integrate_annulus(b.center, b.radius, 2.0 * b.radius, f, q).value;
  } catch (const IntegrationError& e) {
    throw IntegrationError(e.what(), b);
  }
}

}  // namespace

WitnessCutoff build_witness(const Cover& cover, const Weight& w, const QuadratureConfig& q) {
  WitnessCutoff wc;
  wc.cover = cover;
  const auto& balls = cover.balls;
  const std::size_t m = balls.size();
  if (m == 0) return wc;
  std::vector<std::vector<std::size_t>> nb(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (distance(balls[i].center, balls[j].center) < 2.0 * (balls[i].radius + balls[j].radius)) {
        nb[i].push_back(j);
        nb[j].push_back(i);
      }
    }
  }
  struct Part {
    double measured = 0.0, bound = 0.0, h = 0.0, ratio = 1.0;
    bool fallback = false;
  };
  const auto parts = parallel_map<Part>(m, [&](std::size_t j) {
    Part pt;
    const Ball& b = balls[j];
    const double inner = integrate_ball(w, b, q).value;
    const double ann = annulus_integral(w, b, q);
    pt.h = inner / b.radius;
    pt.bound = ann / b.radius;
    pt.ratio = (inner + ann) / inner;
    if (nb[j].empty()) {
      pt.measured = pt.bound;
      return pt;
    }
    const auto ramp = [&](std::size_t i, const Point& x) {
      return std::clamp((2.0 * balls[i].radius - distance(x, balls[i].center)) / balls[i].radius, 0.0, 1.0);
    };
    const Integrand f = [&](const Point& x) {
      const double own = ramp(j, x);
      if (own <= 0.0 || own >= 1.0) return 0.0;
      for (std::size_t i : nb[j]) {
        const double other = ramp(i, x);
        if (other >= 1.0 || other > own || (other == own && i < j)) return 0.0;
      }
      return w.eval_unchecked(x) / b.radius;
    };
    try {
      pt.measured = integrate_annulus(b.center, b.radius, 2.0 * b.radius, f, q).value;
    } catch (const IntegrationError&) {
      pt.measured = pt.bound;
      pt.fallback = true;
    }
    return pt;
  });
  CompensatedSum meas, bound, hs;
  for (const auto& pt : parts) {
    meas.add(pt.measured);
    bound.add(pt.bound);
    hs.add(pt.h);
    wc.local_doubling = std::max(wc.local_doubling, pt.ratio);
    wc.fallback = wc.fallback || pt.fallback;
  }
  wc.gradient_norm = meas.value();
  wc.sum_bound = bound.value();
  wc.h_sum = hs.value();
  return wc;
}

WitnessCutoff build_canonical_witness(const Weight& w, const CantorSpec& spec, const QuadratureConfig& q,
                                      std::uint64_t cap) {
  const double rt = std::sqrt(static_cast<double>(spec.dim()));
  const bool disjoint = spec.generation() == 0 || 1.0 / spec.lambda() >= 1.0 + 2.0 * rt;
  if (!(disjoint && canonical_balls_congruent(w, spec, 2.0))) return build_witness(canonical_cover(spec, cap), w, q);
  Cover one;
  one.balls.push_back(representative_ball(spec));
  one.delta = one.balls.front().radius;
  WitnessCutoff wc = build_witness(one, w, q);
  const double count = spec.cube_count(spec.generation());
  wc.gradient_norm *= count;
  wc.sum_bound *= count;
  wc.h_sum *= count;
  wc.representative = true;
  wc.cover.provenance = "canonical-representative";
  return wc;
}

}  // namespace divcap
