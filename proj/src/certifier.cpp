#include "divcap/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "divcap/frostman.hpp"
#include "divcap/parallel.hpp"
#include "divcap/potentials.hpp"
#include "divcap/weight_analysis.hpp"

namespace divcap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

bool strictly_increasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) return false;
  }
  return true;
}

// Bounding box of the set.
std::pair<Point, Point> set_bounds(const SetSpec& s) {
  return std::visit(Overloaded{
                        [](const CantorSet& c) {
                          const int n = c.spec.dim();
                          Point hi(n);
                          for (int i = 0; i < n; ++i) hi[i] = 1.0;
                          return std::pair{Point(n), hi};
                        },
                        [](const PointSet& p) { return std::pair{p.x, p.x}; },
                        [](const SegmentSet& g) {
                          Point lo = g.a, hi = g.a;
                          for (int i = 0; i < lo.dim(); ++i) {
                            lo[i] = std::min(g.a[i], g.b[i]);
                            hi[i] = std::max(g.a[i], g.b[i]);
                          }
                          return std::pair{lo, hi};
                        },
                        [](const AtomSet& a) {
                          Point lo = a.mu.atoms().front().x, hi = lo;
                          for (const auto& at : a.mu.atoms()) {
                            for (int i = 0; i < lo.dim(); ++i) {
                              lo[i] = std::min(lo[i], at.x[i]);
                              hi[i] = std::max(hi[i], at.x[i]);
                            }
                          }
                          return std::pair{lo, hi};
                        },
                        [](const BallSet& b) {
                          Point lo = b.ball.center, hi = b.ball.center;
                          for (int i = 0; i < lo.dim(); ++i) {
                            lo[i] -= b.ball.radius;
                            hi[i] += b.ball.radius;
                          }
                          return std::pair{lo, hi};
                        },
                    },
                    s);
}

// Cube about the set with at least 25% padding on every side.
Box analysis_box_of(const SetSpec& s) {
  const auto [lo, hi] = set_bounds(s);
  const int n = lo.dim();
  double extent = 0.0;
  for (int i = 0; i < n; ++i) extent = std::max(extent, hi[i] - lo[i]);
  const double half = std::max(1.0, 1.25 * extent);
  Point a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const double c = 0.5 * (lo[i] + hi[i]);
    a[i] = c - half;
    b[i] = c + half;
  }
  return Box(a, b);
}

double dist_to_segment(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double L2 = norm2(ab);
  const double t = L2 > 0.0 ? std::clamp(dot(x - a, ab) / L2, 0.0, 1.0) : 0.0;
  return distance(x, a + ab * t);
}

// Grid nodes within sqrt(n) h / 2 of the set (or inside a ball set).
NodeMask set_mask(const SetSpec& s, const GridField& grid) {
  const int n = grid.dim();
  const double tol = 0.5 * std::sqrt(static_cast<double>(n)) * grid.spacing(0) * (1.0 + 1e-12);
  return std::visit(Overloaded{
                        [&](const CantorSet& c) {
                          return mask_where(grid, [&](const Point& x) { return dist_to_set(c.spec, x) <= tol; });
                        },
                        [&](const PointSet& p) {
                          return mask_where(grid, [&](const Point& x) { return distance(x, p.x) <= tol; });
                        },
                        [&](const SegmentSet& g) {
                          return mask_where(grid,
                                            [&](const Point& x) { return dist_to_segment(x, g.a, g.b) <= tol; });
                        },
                        [&](const AtomSet& a) {
                          return mask_where(grid, [&](const Point& x) {
                            for (const auto& at : a.mu.atoms()) {
                              if (distance(x, at.x) <= tol) return true;
                            }
                            return false;
                          });
                        },
                        [&](const BallSet& b) {
                          return mask_where(grid, [&](const Point& x) {
                            return distance(x, b.ball.center) <= b.ball.radius;
                          });
                        },
                    },
                    s);
}

struct Series {
  std::vector<double> level;
  std::vector<double> value;
};

struct HausdorffEvidence {
  Series upper;
  std::optional<double> exponent;
  Series lower;
  std::vector<FrostmanReport> reports;
  std::string upper_provenance;
  std::size_t unconverged = 0;
};

Cover ball_cover(const std::vector<Point>& centers, double r, const std::string& provenance) {
  Cover c;
  c.delta = r;
  c.provenance = provenance;
  for (const auto& x : centers) c.balls.emplace_back(x, r);
  return c;
}

void run_frostman(HausdorffEvidence& ev, double level, const DiscreteMeasure& mu, std::vector<Ball> balls,
                  const CaseSpec& c) {
  const auto rep = frostman_constant(mu, c.weight, balls, c.budget.frostman_q);
  ev.lower.level.push_back(level);
  ev.lower.value.push_back(rep.lower_bound);
  ev.unconverged += rep.unconverged;
  ev.reports.push_back(rep);
}

HausdorffEvidence atoms_evidence(const DiscreteMeasure& mu, const CaseSpec& c) {
  HausdorffEvidence ev;
  const Budget& b = c.budget;
  std::vector<Point> centers;
  for (const auto& a : mu.atoms()) centers.push_back(a.x);
  std::vector<Ball> cover_balls;
  std::vector<int> ks;
  for (int j = 0; j <= b.point_levels; ++j) {
    const double r = std::ldexp(1.0, -j);
    const Cover cov = ball_cover(centers, r, "atom-balls");
    const auto est = cover_sum(c.weight, cov, b.q);
    ev.upper.level.push_back(j);
    ev.upper.value.push_back(est.value);
    ev.unconverged += est.unconverged;
    ks.push_back(j);
    cover_balls.insert(cover_balls.end(), cov.balls.begin(), cov.balls.end());
  }
  ev.upper_provenance = "atom-balls";
  ev.exponent = fit_decay_exponent(ks, ev.upper.value);
  const int levels = static_cast<int>(b.frostman_generations.size());
  for (int i = 0; i < levels; ++i) {
    const int j = b.point_levels - (levels - 1 - i);
    if (j < 0) continue;
    const double r = std::ldexp(1.0, -j);
    BallSampleOptions opt;
    opt.off_center = b.frostman_off_center;
    opt.seed = b.seed;
    opt.r_min = r;
    opt.r_max = std::max(1.0, mu.diameter());
    auto balls = default_ball_sample(mu, opt);
    for (std::size_t k = 0; k < cover_balls.size(); ++k) {
      if (cover_balls[k].radius >= r) balls.push_back(cover_balls[k]);
    }
    run_frostman(ev, j, mu, std::move(balls), c);
  }
  return ev;
}

HausdorffEvidence segment_evidence(const SegmentSet& s, const CaseSpec& c) {
  HausdorffEvidence ev;
  const Budget& b = c.budget;
  std::vector<Ball> cover_balls;
  for (int N : b.segment_covers) {
    const Cover cov = aligned_segment_cover(s.a, s.b, N);
    const auto est = cover_sum(c.weight, cov, b.q);
    ev.upper.level.push_back(N);
    ev.upper.value.push_back(est.value);
    ev.unconverged += est.unconverged;
    cover_balls.insert(cover_balls.end(), cov.balls.begin(), cov.balls.end());
  }
  ev.upper_provenance = "aligned-segment";
  std::vector<int> idx(b.segment_covers.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  ev.exponent = fit_decay_exponent(idx, ev.upper.value);
  for (int N : b.segment_atoms) {
    const auto mu = segment_measure(s.a, s.b, N);
    BallSampleOptions opt;
    opt.off_center = b.frostman_off_center;
    opt.seed = b.seed;
    auto balls = default_ball_sample(mu, opt);
    balls.insert(balls.end(), cover_balls.begin(), cover_balls.end());
    run_frostman(ev, N, mu, std::move(balls), c);
  }
  return ev;
}

int cantor_ladder_top(const Weight& w, const CantorSpec& spec, const Budget& b) {
  const int k_max = spec.generation();
  if (canonical_balls_congruent(w, spec.at_generation(std::max(1, k_max)))) return std::max(k_max, b.k_extend);
  return k_max;
}

HausdorffEvidence cantor_evidence(const CantorSet& s, const CaseSpec& c) {
  HausdorffEvidence ev;
  const Budget& b = c.budget;
  const CantorSpec& spec = s.spec;
  const int top = cantor_ladder_top(c.weight, spec, b);
  std::vector<int> ks;
  for (int k = 0; k <= top; ++k) ks.push_back(k);
  const auto curve = content_upper_curve(c.weight, spec, ks, b.q, b.enumeration_cap);
  for (const auto& p : curve.points) {
    ev.upper.level.push_back(p.k);
    ev.upper.value.push_back(p.estimate.value);
    ev.unconverged += p.estimate.unconverged;
  }
  ev.exponent = curve.exponent;
  ev.upper_provenance = curve.points.back().estimate.provenance;
  const bool congruent = canonical_balls_congruent(c.weight, spec.at_generation(1));
  for (int g : b.frostman_generations) {
    const auto sg = spec.at_generation(g);
    const auto mu = natural_measure(sg, b.enumeration_cap);
    BallSampleOptions opt;
    opt.off_center = b.frostman_off_center;
    opt.seed = b.seed;
    auto balls = default_ball_sample(mu, opt);
    for (int j = 0; j <= g; ++j) {
      const auto sj = spec.at_generation(j);
      if (congruent) {
        balls.push_back(representative_ball(sj));
      } else {
        const auto cov = canonical_cover(sj, b.enumeration_cap);
        balls.insert(balls.end(), cov.balls.begin(), cov.balls.end());
      }
    }
    run_frostman(ev, g, mu, std::move(balls), c);
  }
  return ev;
}

struct Decision {
  bool removable = false;
  bool non_removable = false;
};

Decision decide_hausdorff(const HausdorffEvidence& ev, std::size_t upper_n, std::size_t lower_n,
                          const Margins& m) {
  Decision d;
  if (upper_n >= 2) {
    const double first = ev.upper.value.front();
    const double last = ev.upper.value[upper_n - 1];
    std::vector<int> ks;
    std::vector<double> vals(ev.upper.value.begin(), ev.upper.value.begin() + static_cast<long>(upper_n));
    for (std::size_t i = 0; i < upper_n; ++i) ks.push_back(static_cast<int>(i));
    const auto e = upper_n == ev.upper.value.size() ? ev.exponent : fit_decay_exponent(ks, vals);
    d.removable = first > 0.0 && last <= m.decay_factor * first && e && *e > 0.0;
  }
  if (lower_n >= 2 && upper_n >= 1) {
    const double a = ev.lower.value[lower_n - 2], b = ev.lower.value[lower_n - 1];
    const bool stable = b > 0.0 && std::abs(b - a) <= m.stability * b;
    d.non_removable = stable && b > m.separation * m.decay_factor * ev.upper.value.front();
  }
  return d;
}

Outcome outcome_of(const Decision& d) {
  if (d.removable && d.non_removable) throw ContradictionError("both the removable and the non-removable criterion fired");
  if (d.removable) return Outcome::removable;
  if (d.non_removable) return Outcome::non_removable;
  return Outcome::inconclusive;
}

void check_refinement(Outcome prefix, Outcome full) {
  if (prefix != Outcome::inconclusive && full != Outcome::inconclusive && prefix != full) {
    throw ContradictionError("a refinement flipped the verdict from " + to_string(prefix) + " to " + to_string(full));
  }
}

std::vector<Point> growth_base_points(const SetSpec& s) {
  const auto [lo, hi] = set_bounds(s);
  const int n = lo.dim();
  Point bary = (lo + hi) * 0.5;
  if (const auto* a = std::get_if<AtomSet>(&s)) {
    bary = Point(n);
    for (const auto& at : a->mu.atoms()) bary += at.x * (at.m / a->mu.total());
  }
  double extent = 0.0;
  for (int i = 0; i < n; ++i) extent = std::max(extent, hi[i] - lo[i]);
  const double step = 0.1 * std::max(extent, 1.0);
  std::vector<Point> pts{bary};
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total && pts.size() < 9; ++code) {
    Point d(n);
    int rem = code;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      d[i] = static_cast<double>(rem % 3) - 1.0;
      rem /= 3;
      zero = zero && d[i] == 0.0;
    }
    if (!zero) pts.push_back(bary + d * (step / norm(d)));
  }
  return pts;
}

void add_weight_advisories(Verdict& v, const CaseSpec& c, const Box& region) {
  const Budget& b = c.budget;
  try {
    if (c.infinite_p()) {
      const auto a1 = estimate_Ap(c.weight, 1.0, region, b.ap_samples, b.q);
      v.advisories.push_back({"A1", a1.constant, a1.infinite ? "blow-up detected" : "sampled lower estimate"});
    } else {
      const double pc = c.conjugate();
      const auto ap = estimate_Ap(c.weight.pow(pc - 1.0), pc, region, b.ap_samples, b.q);
      v.advisories.push_back({"Ap_conjugate", ap.constant,
                              "A_{p'} of w^{p'-1}" + std::string(ap.infinite ? ", blow-up detected" : "")});
    }
  } catch (const std::exception& e) {
    v.advisories.push_back({"admissibility", std::nan(""), std::string("estimate failed: ") + e.what()});
  }
  try {
    const auto cd = estimate_doubling(c.weight, region, b.doubling_samples, b.q);
    v.advisories.push_back({"C_D", cd.C_D, "sampled doubling constant"});
  } catch (const std::exception& e) {
    v.advisories.push_back({"C_D", std::nan(""), std::string("estimate failed: ") + e.what()});
  }
}

void add_growth_advisory(Verdict& v, const CaseSpec& c) {
  Table t{"growth", {"base", "radius", "h"}, {}};
  int diverging = 0, bounded = 0, total = 0;
  double min_slope = std::numeric_limits<double>::infinity();
  try {
    const auto pts = growth_base_points(c.set);
    const auto reports = parallel_map<GrowthReport>(pts.size(), [&](std::size_t i) {
      return check_growth(c.weight, pts[i], c.budget.growth_radii, c.budget.q);
    });
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      ++total;
      if (r.trend == GrowthTrend::diverging) ++diverging;
      if (r.trend == GrowthTrend::bounded) ++bounded;
      min_slope = std::min(min_slope, r.slope);
      for (std::size_t j = 0; j < r.radii.size(); ++j) {
        t.rows.push_back({static_cast<double>(i), r.radii[j], r.h[j]});
      }
    }
  } catch (const std::exception& e) {
    v.advisories.push_back({"growth", std::nan(""), std::string("check failed: ") + e.what()});
    return;
  }
  std::string note = std::to_string(diverging) + "/" + std::to_string(total) + " base points diverging";
  if (bounded > 0) note += ", " + std::to_string(bounded) + " bounded";
  v.advisories.push_back({"growth_min_slope", min_slope, note});
  v.tables.push_back(std::move(t));
}

std::string budget_text(const CaseSpec& c) {
  const Budget& b = c.budget;
  std::string s = "budget {";
  if (c.infinite_p()) {
    s += "frostman levels [" + join_ints(b.frostman_generations) + "], k_extend " + std::to_string(b.k_extend) +
         ", point levels " + std::to_string(b.point_levels);
  } else {
    s += "grid ladder [" + join_ints(b.capacity_ladder) + "], " + to_string(b.variant);
  }
  s += ", quadrature rel_tol " + fmt(b.q.rel_tol) + "}";
  return s;
}

std::string margins_text(const CaseSpec& c) {
  const Margins& m = c.margins;
  if (c.infinite_p()) {
    return "margins {decay " + fmt(m.decay_factor) + ", stability " + fmt(m.stability) + ", separation " +
           fmt(m.separation) + "}";
  }
  return "margins {null ratio " + fmt(m.zero.null_ratio) + ", stability " + fmt(m.zero.stable_tol) + "}";
}

void certify_hausdorff(Verdict& v, const CaseSpec& c) {
  v.branch = Branch::hausdorff;
  HausdorffEvidence ev = std::visit(Overloaded{
                                        [&](const CantorSet& s) { return cantor_evidence(s, c); },
                                        [&](const PointSet& s) {
                                          return atoms_evidence(DiscreteMeasure({Atom{s.x, 1.0}}), c);
                                        },
                                        [&](const SegmentSet& s) { return segment_evidence(s, c); },
                                        [&](const AtomSet& s) { return atoms_evidence(s.mu, c); },
                                        [&](const BallSet&) -> HausdorffEvidence {
                                          throw DomainError("ball sets are supported by the capacity branch only");
                                        },
                                    },
                                    c.set);
  const std::size_t nu = ev.upper.value.size(), nl = ev.lower.value.size();
  const Outcome full = outcome_of(decide_hausdorff(ev, nu, nl, c.margins));
  if (nu > 2 && nl > 2) check_refinement(outcome_of(decide_hausdorff(ev, nu - 1, nl - 1, c.margins)), full);
  v.outcome = full;

  Table curve{"content_curve", {"level", "upper_sum"}, {}};
  for (std::size_t i = 0; i < nu; ++i) curve.rows.push_back({ev.upper.level[i], ev.upper.value[i]});
  Table fr{"frostman", {"level", "total", "C_hat", "lower_bound", "samples", "unconverged"}, {}};
  for (std::size_t i = 0; i < nl; ++i) {
    const auto& r = ev.reports[i];
    fr.rows.push_back({ev.lower.level[i], r.total, r.C_hat, r.lower_bound, static_cast<double>(r.samples),
                       static_cast<double>(r.unconverged)});
  }
  v.tables.push_back(std::move(curve));
  v.tables.push_back(std::move(fr));
  v.evidence.push_back({"content_upper_first", "upper", ev.upper.value.front(), "content_curve"});
  v.evidence.push_back({"content_upper_final", "upper", ev.upper.value.back(), "content_curve"});
  v.evidence.push_back({"content_exponent", "estimate", ev.exponent ? *ev.exponent : std::nan(""), "content_curve"});
  if (nl > 0) v.evidence.push_back({"frostman_lower", "lower", ev.lower.value.back(), "frostman"});
  if (ev.unconverged > 0) {
    v.advisories.push_back({"unconverged_integrals", static_cast<double>(ev.unconverged), "quadrature tolerance missed"});
  }
  add_weight_advisories(v, c, analysis_box_of(c.set));
  add_growth_advisory(v, c);
}

void certify_capacity(Verdict& v, const CaseSpec& c) {
  v.branch = Branch::capacity;
  const auto ladder = run_capacity_ladder(c);
  std::vector<double> values;
  Table t{"capacity_ladder", {"resolution", "value", "converged", "iterations", "clamp_violations", "capped_cells"}, {}};
  bool all_converged = true;
  for (std::size_t i = 0; i < ladder.levels.size(); ++i) {
    const auto& est = ladder.levels[i];
    values.push_back(est.value);
    all_converged = all_converged && est.converged;
    t.rows.push_back({static_cast<double>(est.resolution), est.value, est.converged ? 1.0 : 0.0,
                      static_cast<double>(est.iterations), static_cast<double>(est.clamp_violations),
                      static_cast<double>(est.capped_cells)});
  }
  const auto map = [](ZeroVerdict z) {
    return z == ZeroVerdict::null ? Outcome::removable
                                  : z == ZeroVerdict::positive ? Outcome::non_removable : Outcome::inconclusive;
  };
  const Outcome full = map(ladder.verdict);
  if (values.size() > 3) {
    check_refinement(map(capacity_zero_verdict({values.begin(), values.end() - 1}, c.margins.zero)), full);
  }
  v.outcome = full;
  v.tables.push_back(std::move(t));
  v.evidence.push_back({"capacity_final", "upper", values.back(), "capacity_ladder"});
  v.evidence.push_back({"conjugate_exponent", "estimate", c.conjugate(), ""});
  if (!all_converged) v.advisories.push_back({"solver_unconverged", 1.0, "a ladder level hit the iteration cap"});
  add_weight_advisories(v, c, analysis_box_of(c.set));
}

}  // namespace

Box analysis_box(const SetSpec& s) { return analysis_box_of(s); }

CapacityLadder run_capacity_ladder(const CaseSpec& c) {
  if (c.infinite_p()) throw DomainError("the capacity ladder needs a finite p");
  const Budget& b = c.budget;
  const double pc = c.conjugate();
  const Weight wp = c.weight.pow(pc - 1.0);
  const Box box = analysis_box_of(c.set);
  CapacityLadder out;
  std::vector<double> values;
  for (std::size_t i = 0; i < b.capacity_ladder.size(); ++i) {
    const GridField grid(box, b.capacity_ladder[i]);
    const NodeMask E = set_mask(c.set, grid);
    const GridField* init = i ? &out.levels.back().field : nullptr;
    auto est = solve_capacity(wp, E, pc, b.variant, grid, b.solver, {}, init);
    values.push_back(est.value);
    if (i) out.levels.back().field = GridField();
    out.levels.push_back(std::move(est));
  }
  out.verdict = capacity_zero_verdict(values, c.margins.zero);
  return out;
}

int set_dim(const SetSpec& s) {
  return std::visit(Overloaded{
                        [](const CantorSet& c) { return c.spec.dim(); },
                        [](const PointSet& p) { return p.x.dim(); },
                        [](const SegmentSet& g) { return g.a.dim(); },
                        [](const AtomSet& a) { return a.mu.dim(); },
                        [](const BallSet& b) { return b.ball.dim(); },
                    },
                    s);
}

std::string set_kind(const SetSpec& s) {
  static const char* names[] = {"cantor", "point", "segment", "atoms", "ball"};
  return names[s.index()];
}

void Budget::validate() const {
  q.validate();
  frostman_q.validate();
  if (k_extend < 0) throw DomainError("budget k_extend must be >= 0");
  if (point_levels < 1) throw DomainError("budget point_levels must be >= 1");
  const auto positive_increasing = [](const std::vector<int>& v, const char* what, int lo) {
    if (v.empty()) throw DomainError(std::string("budget ") + what + " must be nonempty");
    for (int x : v) {
      if (x < lo) throw DomainError(std::string("budget ") + what + " entries must be >= " + std::to_string(lo));
    }
    if (!strictly_increasing(v)) throw DomainError(std::string("budget ") + what + " must increase");
  };
  positive_increasing(segment_covers, "segment_covers", 1);
  positive_increasing(segment_atoms, "segment_atoms", 1);
  positive_increasing(frostman_generations, "frostman_generations", 0);
  positive_increasing(capacity_ladder, "capacity_ladder", 4);
  if (frostman_off_center < 0) throw DomainError("budget frostman_off_center must be >= 0");
  if (solver.max_iterations < 1 || solver.window < 1) throw DomainError("solver iteration settings must be positive");
  if (!(solver.rel_decrease > 0.0)) throw DomainError("solver rel_decrease must be positive");
  if (growth_radii.size() < 2) throw DomainError("budget growth_radii needs at least two radii");
}

void Margins::validate() const {
  if (!(decay_factor > 0.0 && decay_factor < 1.0)) throw DomainError("margin decay_factor must lie in (0, 1)");
  if (!(stability > 0.0 && stability < 1.0)) throw DomainError("margin stability must lie in (0, 1)");
  if (!(separation >= 1.0)) throw DomainError("margin separation must be >= 1");
  if (!(witness_slack >= 1.0)) throw DomainError("margin witness_slack must be >= 1");
  if (!(zero.null_ratio > 1.0)) throw DomainError("margin null_ratio must exceed 1");
  if (!(zero.stable_tol > 0.0)) throw DomainError("margin stable_tol must be positive");
}

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  return p / (p - 1.0);
}

double CaseSpec::conjugate() const { return conjugate_exponent(p); }

void CaseSpec::validate() const {
  if (!(p > 1.0)) throw DomainError("p must exceed 1 or be inf");
  const int n = set_dim(set);
  require_dim(n);
  require_same_dim(weight.dim(), n, "case weight and set");
  if (const auto* a = std::get_if<AtomSet>(&set); a && a->mu.empty()) throw DomainError("atom set is empty");
  if (const auto* g = std::get_if<SegmentSet>(&set)) {
    require_same_dim(g->a.dim(), g->b.dim(), "segment endpoints");
    if (g->a == g->b) throw DomainError("segment endpoints coincide");
  }
  if (std::holds_alternative<BallSet>(set) && infinite_p()) {
    throw DomainError("ball sets are supported by the capacity branch only");
  }
  budget.validate();
  margins.validate();
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::removable: return "removable";
    case Outcome::non_removable: return "non_removable";
    default: return "inconclusive";
  }
}

std::string to_string(Branch b) { return b == Branch::hausdorff ? "hausdorff" : "capacity"; }

void write_table_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  os.precision(17);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

Verdict certify(const CaseSpec& c) {
  c.validate();
  Verdict v;
  v.branch = c.infinite_p() ? Branch::hausdorff : Branch::capacity;
  try {
    if (c.infinite_p()) {
      certify_hausdorff(v, c);
    } else {
      certify_capacity(v, c);
    }
  } catch (const ContradictionError&) {
    throw;
  } catch (const std::exception& e) {
    v.outcome = Outcome::inconclusive;
    v.failure = e.what();
  }
  v.statement = to_string(v.outcome) + ": certified at " + budget_text(c) + " under " + margins_text(c);
  return v;
}

std::vector<SweepRow> sweep_cantor(const SweepSettings& cfg) {
  struct Cell {
    double gamma, s;
  };
  std::vector<Cell> cells;
  for (double g : cfg.gammas) {
    for (double s : cfg.dims) cells.push_back({g, s});
  }
  const auto rows = parallel_map<SweepRow>(cells.size(), [&](std::size_t i) {
    SweepRow row;
    row.gamma = cells[i].gamma;
    row.s = cells[i].s;
    try {
      const auto pred = cantor_decay_exponent(cfg.n, row.gamma, row.s);
      row.predicted = pred.exponent;
      row.threshold = pred.threshold;
      const auto spec = CantorSpec::from_dimension(cfg.n, row.s, cfg.k_max);
      CaseSpec c;
      c.p = std::numeric_limits<double>::infinity();
      c.weight = Weight::cantor_distance(cfg.n, row.s, row.gamma);
      c.set = CantorSet{spec};
      c.budget = cfg.budget;
      c.margins = cfg.margins;
      const Verdict v = certify(c);
      row.verdict = to_string(v.outcome);
      if (v.failure) row.error = *v.failure;
      for (const auto& e : v.evidence) {
        if (e.name == "content_exponent") row.empirical = e.value;
        if (e.name == "frostman_lower") row.frostman_lower = e.value;
      }
      if (std::abs(row.predicted) > 0.2) {
        row.sign_agrees = std::isfinite(row.empirical) && (row.empirical > 0.0) == (row.predicted > 0.0);
      }

      const Budget& b = cfg.budget;
      Point hi(cfg.n);
      for (int d = 0; d < cfg.n; ++d) hi[d] = 1.0;
      const double cd = estimate_doubling(c.weight, Box(Point(cfg.n), hi), b.doubling_samples, b.q).C_D;
      row.witness_C_D = cd;
      const double rt = std::sqrt(static_cast<double>(cfg.n));
      const bool representative = 1.0 / spec.lambda() >= 1.0 + 2.0 * rt &&
                                  canonical_balls_congruent(c.weight, spec.at_generation(1), 2.0);
      const int top = representative ? std::max(cfg.k_max, b.k_extend) : cfg.k_max;
      std::vector<int> ks;
      std::vector<double> norms;
      double worst = 0.0;
      for (int k = 0; k <= top; ++k) {
        const auto wc = build_canonical_witness(c.weight, spec.at_generation(k), b.q, b.enumeration_cap);
        const double C = std::max(cd, wc.local_doubling);
        worst = std::max(worst, wc.gradient_norm / (C * wc.h_sum));
        ks.push_back(k);
        norms.push_back(wc.gradient_norm);
      }
      row.witness_max_ratio = worst;
      const auto we = fit_decay_exponent(ks, norms);
      row.witness_exponent = we ? *we : std::nan("");
      row.witness_ok = worst <= cfg.margins.witness_slack;
      if (row.predicted > 0.2) {
        row.witness_ok = row.witness_ok && std::abs(row.witness_exponent - row.empirical) <= cfg.margins.witness_rate_tol;
      }
    } catch (const ContradictionError& e) {
      row.verdict = "error";
      row.error = std::string("contradiction: ") + e.what();
    } catch (const std::exception& e) {
      row.verdict = "error";
      row.error = e.what();
    }
    return row;
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "gamma,s,predicted_exponent,empirical_exponent,threshold,verdict,sign_agrees,frostman_lower,"
        "witness_C_D,witness_max_ratio,witness_exponent,witness_ok,error\n";
  os.precision(17);
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.gamma << "," << r.s << "," << r.predicted << "," << r.empirical << "," << r.threshold << ","
       << r.verdict << "," << (r.sign_agrees ? 1 : 0) << "," << r.frostman_lower << "," << r.witness_C_D << ","
       << r.witness_max_ratio << "," << r.witness_exponent << "," << (r.witness_ok ? 1 : 0) << "," << err << "\n";
  }
}

}  // namespace divcap
