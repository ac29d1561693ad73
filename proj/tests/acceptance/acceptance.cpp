// One PASS/FAIL line per acceptance criterion; exit status 1 on any FAIL.
// Optional arguments select criteria by id (e.g. `acceptance AC4 AC7`).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "divcap/capacity.hpp"
#include "divcap/certifier.hpp"
#include "divcap/potentials.hpp"
#include "divcap/quadrature.hpp"
#include "divcap/weight_analysis.hpp"

using namespace divcap;
namespace fs = std::filesystem;

namespace {

struct Outcome_ {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

double evidence(const Verdict& v, const std::string& name) {
  for (const auto& e : v.evidence) {
    if (e.name == name) return e.value;
  }
  return std::nan("");
}

// Sweep rows are shared by AC6 and AC11.
const std::vector<SweepRow>& sweep_rows(double* seconds = nullptr) {
  static std::vector<SweepRow> rows;
  static double elapsed = 0.0;
  static bool done = false;
  if (!done) {
    const auto t0 = Clock::now();
    rows = sweep_cantor(SweepSettings{});
    elapsed = seconds_since(t0);
    done = true;
  }
  if (seconds) *seconds = elapsed;
  return rows;
}

void ac1(Outcome_& o) {
  const QuadratureConfig q;
  for (int n : {2, 3}) {
    const Weight w = Weight::constant(n);
    const Box box = Box::cube(n, -1.0, 1.0);
    const auto t0 = Clock::now();
    const double cd = estimate_doubling(w, box, 32, q).C_D;
    const double a1 = estimate_Ap(w, 1.0, box, 32, q).constant;
    const double t = seconds_since(t0);
    o.detail << "n=" << n << " C_D=" << cd << " A1=" << a1 << " t=" << t << "s; ";
    o.require(close(cd, std::pow(2.0, n), 0.01), "C_D");
    o.require(close(a1, 1.0, 0.01), "A1");
    o.require(t < 10.0, "runtime");
  }
}

void ac2(Outcome_& o) {
  const QuadratureConfig q;
  double worst = 0.0, worst_cubature = 0.0;
  for (int n : {2, 3}) {
    const Point c(n);
    for (double eta : {-1.0, -0.5, 0.0, 1.0}) {
      const Weight w = Weight::radial_power(eta, c);
      for (double r : {0.25, 1.0, 3.0}) {
        const double exact = radial_ball_integral(n, RadialForm{1.0, eta}, r);
        const double ib = integrate_ball(w, Ball(c, r), q).value;
        const double hv = h_value(w, Ball(c, r), q).value;
        worst = std::max({worst, std::abs(ib - exact) / exact, std::abs(hv - exact / r) / (exact / r)});
        // generic adaptive cubature, bypassing the radial closed form
        const double cub = integrate_ball_fn(Ball(c, r), [&](const Point& x) { return w(x); }, q).value;
        worst_cubature = std::max(worst_cubature, std::abs(cub - exact) / exact);
      }
    }
  }
  o.detail << "max relative error " << worst << ", generic cubature " << worst_cubature;
  o.require(worst <= 1e-4, "tolerance");
  o.require(worst_cubature <= 1e-4, "cubature tolerance");
}

void ac3(Outcome_& o) {
  const QuadratureConfig q;
  const auto radii = log_spaced(1.0, 100.0, 9);
  for (int n : {2, 3}) {
    const Point c(n);
    std::vector<double> etas{-1.0, -0.5, 0.0, 1.0};
    if (n == 3) etas.push_back(-2.0);
    for (double eta : etas) {
      const auto g = check_growth(Weight::radial_power(eta, c), c, radii, q);
      const double expect = n + eta - 1.0;
      o.detail << "n=" << n << " eta=" << eta << " slope=" << g.slope << " " << to_string(g.trend) << "; ";
      o.require(std::abs(g.slope - expect) <= 0.05, "slope");
      if (eta == 1.0 - n) o.require(g.trend == GrowthTrend::bounded, "boundary trend");
      if (eta > 1.0 - n) o.require(g.trend == GrowthTrend::diverging, "trend above boundary");
    }
  }
}

void ac4(Outcome_& o) {
  CaseSpec c;
  c.set = SegmentSet{Point{0.0, 0.0}, Point{1.0, 0.0}};
  const auto t0 = Clock::now();
  const Verdict v = certify(c);
  const double t = seconds_since(t0);
  const double upper = evidence(v, "content_upper_final");
  const double lower = evidence(v, "frostman_lower");
  o.detail << "upper=" << upper << " frostman=" << lower << " verdict=" << to_string(v.outcome) << " t=" << t
           << "s";
  o.require(upper <= std::numbers::pi / 2.0 * 1.01, "content upper bound");
  o.require(lower >= std::numbers::pi / 2.0 * 0.95, "Frostman lower bound");
  o.require(v.outcome == Outcome::non_removable, "verdict");
  o.require(t < 30.0, "runtime");
}

void ac5(Outcome_& o) {
  CaseSpec c;
  c.set = PointSet{Point{0.0, 0.0}};
  const auto t0 = Clock::now();
  const Verdict v = certify(c);
  const double t = seconds_since(t0);
  const double ratio = evidence(v, "content_upper_first") / evidence(v, "content_upper_final");
  o.detail << "decay factor " << ratio << " verdict=" << to_string(v.outcome) << " t=" << t << "s";
  o.require(ratio >= 1e3, "decay");
  o.require(v.outcome == Outcome::removable, "verdict");
  o.require(t < 10.0, "runtime");
}

void ac6(Outcome_& o) {
  double t = 0.0;
  const auto& rows = sweep_rows(&t);
  o.require(rows.size() == 12, "12 cells");
  for (const auto& r : rows) {
    o.require(r.verdict != "error", "cell error: " + r.error);
    o.require(r.sign_agrees, "sign agreement");
    if (r.gamma == 0.25) {
      o.detail << "s=" << r.s << ": exp=" << r.empirical << " " << r.verdict << "; ";
      if (r.s == 0.5) o.require(std::abs(r.empirical - 0.5) <= 0.1, "exponent at s = 0.5");
      if (r.s < 2.0 / 3.0) o.require(r.verdict == "removable", "removable below threshold");
    }
    if (r.s == 1.0) {
      o.require(r.verdict == "non_removable", "s = 1 non_removable");
      o.require(r.frostman_lower > 0.0, "Frostman bound");
    }
  }
  o.detail << "t=" << t << "s";
  o.require(t < 600.0, "runtime");
}

CapacityEstimate condenser(int n, int res) {
  const Box box = Box::cube(n, -2.0, 2.0);
  const GridField grid(box, res);
  const auto E = mask_where(grid, [](const Point& x) { return norm(x) <= 0.5; });
  const auto Z = mask_where(grid, [](const Point& x) { return norm(x) >= 2.0; });
  SolverConfig cfg;
  cfg.check_clamp = true;
  return solve_capacity(Weight::constant(n), E, 2.0, CapacityVariant::dirichlet, grid, cfg, Z);
}

void ac7(Outcome_& o) {
  const auto t0 = Clock::now();
  for (int n : {2, 3}) {
    const auto est = condenser(n, 96);
    const double exact = radial_oracle(n, 2.0, 0.5, 2.0);
    o.detail << "n=" << n << " cap=" << est.value << " exact=" << exact
             << " rel=" << std::abs(est.value - exact) / exact << " clamp " << est.clamp_violations << "/"
             << est.clamp_checks << "; ";
    o.require(close(est.value, exact, 0.05), "capacity");
    o.require(est.clamp_checks > 0 && est.clamp_violations == 0, "clamp descent");
  }
  const double t = seconds_since(t0);
  o.detail << "t=" << t << "s";
  o.require(t < 300.0, "runtime");
}

void ac8(Outcome_& o) {
  CaseSpec c;
  c.p = 2.0;
  c.set = PointSet{Point{0.0, 0.0}};
  const auto point = run_capacity_ladder(c);
  c.set = SegmentSet{Point{-0.5, 0.0}, Point{0.5, 0.0}};
  const auto seg = run_capacity_ladder(c);
  for (const auto* l : {&point, &seg}) {
    for (const auto& e : l->levels) o.detail << e.value << " ";
    o.detail << "-> " << to_string(l->verdict) << "; ";
  }
  o.require(point.levels.size() == 3 && seg.levels.size() == 3, "3-level ladder");
  o.require(point.verdict == ZeroVerdict::null, "point null");
  o.require(seg.verdict == ZeroVerdict::positive, "segment positive");
}

DiscreteMeasure atom_measure(int n, int count) {
  std::vector<Atom> a;
  for (int i = 0; i < count; ++i) {
    Point x(n);
    for (int d = 0; d < n; ++d) x[d] = 0.6 * (radical_inverse(i + 1, d == 0 ? 2 : (d == 1 ? 3 : 5)) - 0.5);
    a.push_back({x, 1.0 / count});
  }
  return DiscreteMeasure(std::move(a));
}

void ac9(Outcome_& o) {
  double worst = 0.0;
  ShellConfig cfg;
  cfg.q.rel_tol = 1e-3;
  for (int n : {2, 3}) {
    for (int count : {1, 2, 16}) {
      const auto mu = atom_measure(n, count);
      for (const auto& phi : test_function_library(Point(n), 1.0)) {
        worst = std::max(worst, verify_divergence(mu, phi, cfg).residual);
      }
    }
  }
  o.detail << "max residual " << worst;
  o.require(worst <= 0.01, "residual");
}

void ac10(Outcome_& o) {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}});
  for (double p : {1.2, 1.5, 1.9, 2.1, 3.0}) {
    const auto e = riesz_energy(mu, Weight::constant(2), p, 1.0);
    o.detail << "p=" << p << (e.diverging ? " diverging" : " finite") << "; ";
    if (p < 2.0) {
      const double exact = 2.0 * std::numbers::pi * std::pow(3.0, 2.0 - p) / (2.0 - p);
      o.require(!e.diverging && close(e.value, exact, 1e-3), "finite energy");
    } else {
      o.require(e.diverging, "diverging energy");
    }
  }
}

void ac11(Outcome_& o) {
  const auto& rows = sweep_rows();
  const Margins m;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (r.verdict == "error") continue;
    worst = std::max(worst, r.witness_max_ratio);
    o.require(r.witness_max_ratio <= m.witness_slack, "norm bound");
    if (r.predicted > 0.0) {
      o.require(std::abs(r.witness_exponent - r.empirical) <= m.witness_rate_tol, "decay rate");
    }
    o.require(r.witness_ok, "witness check");
  }
  o.detail << "max norm/(C_D sum h)=" << worst;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ac12(Outcome_& o) {
  const fs::path dir = fs::temp_directory_path() / "divcap_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> configs{
      {"certify", R"({"command": "certify", "case": {"p": "inf", "weight": {"type": "cantor_distance", "s": 0.5,
          "gamma": 0.25}, "set": {"type": "cantor", "n": 2, "s": 0.5, "generation": 3}}})"},
      {"capacity", R"({"command": "capacity", "case": {"p": 2, "set": {"type": "segment", "a": [-0.5, 0],
          "b": [0.5, 0]}}, "budget": {"capacity_ladder": [8, 16, 32]}, "capacity": {"write_field": true}})"},
      {"weight-info", R"({"command": "weight-info", "case": {"p": 3, "weight": {"type": "radial_power", "eta": -0.5,
          "center": [0, 0]}, "set": {"type": "point", "x": [0, 0]}}})"},
  };
  std::size_t compared = 0;
  for (const auto& [cmd, text] : configs) {
    const fs::path cfg = dir / (cmd + ".json");
    std::ofstream(cfg) << text;
    std::vector<fs::path> outs;
    for (int threads : {1, 2, 3}) {
      const fs::path out = dir / (cmd + "_t" + std::to_string(threads));
      const std::string line = std::string(DIVCAP_CLI) + " " + cmd + " --config " + cfg.string() + " --out " +
                               out.string() + " --seed 7 --threads " + std::to_string(threads) + " > /dev/null 2>&1";
      o.require(std::system(line.c_str()) == 0, cmd + " run");
      outs.push_back(out);
    }
    for (const auto& entry : fs::recursive_directory_iterator(outs[0])) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), outs[0]);
      const std::string ref = slurp(entry.path());
      for (std::size_t i = 1; i < outs.size(); ++i) {
        o.require(fs::exists(outs[i] / rel) && slurp(outs[i] / rel) == ref, "identical " + rel.string());
      }
      ++compared;
    }
  }
  o.detail << compared << " files compared across 1/2/3 threads";
  o.require(compared > 0, "outputs present");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome_&)>>> criteria{
      {"AC1 constant-weight constants", ac1}, {"AC2 radial closed forms", ac2},
      {"AC3 growth condition", ac3},          {"AC4 segment non-removability", ac4},
      {"AC5 point removability", ac5},        {"AC6 Cantor threshold sweep", ac6},
      {"AC7 condenser capacity", ac7},        {"AC8 capacity zero-verdicts", ac8},
      {"AC9 divergence identity", ac9},       {"AC10 Riesz energy threshold", ac10},
      {"AC11 witness bound", ac11},           {"AC12 determinism", ac12},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto& [name, fn] : criteria) {
    const std::string id = name.substr(0, name.find(' '));
    if (!only.empty() && !only.count(id)) continue;
    Outcome_ o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
  }
  return all_pass ? 0 : 1;
}
