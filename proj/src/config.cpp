#include "divcap/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "divcap/cantor_integral.hpp"
#include "divcap/frostman.hpp"
#include "divcap/parallel.hpp"
#include "divcap/potentials.hpp"
#include "divcap/test_function.hpp"
#include "divcap/weight_analysis.hpp"

namespace divcap {

namespace {

using json = nlohmann::json;

std::string escape_token(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') {
      out += "~0";
    } else if (ch == '/') {
      out += "~1";
    } else {
      out += ch;
    }
  }
  return out;
}

// A JSON value together with its pointer, for error reporting.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {}

  const std::string& ptr() const { return ptr_; }
  const json& raw() const { return *j_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(ptr_, msg); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Node at(const std::string& key) const {
    if (!has(key)) throw ConfigError(ptr_ + "/" + escape_token(key), "required field is missing");
    return Node((*j_)[key], ptr_ + "/" + escape_token(key));
  }
  std::size_t size() const { return j_->size(); }
  Node item(std::size_t i) const { return Node((*j_)[i], ptr_ + "/" + std::to_string(i)); }

  const Node& object(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j_->items()) {
      if (!ok.count(key)) throw ConfigError(ptr_ + "/" + escape_token(key), "unknown field");
    }
    return *this;
  }
  const Node& array() const {
    if (!j_->is_array()) fail("expected an array");
    return *this;
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("expected a positive number");
    return v;
  }
  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    if (j_->is_number_unsigned() && j_->get<std::uint64_t>() > static_cast<std::uint64_t>(
                                                                   std::numeric_limits<long long>::max())) {
      fail("integer out of range");
    }
    return j_->get<long long>();
  }
  int small_int(long long lo, long long hi) const {
    const long long v = integer();
    if (v < lo || v > hi) fail("expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  }
  std::uint64_t unsigned_int() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    if (!j_->is_number_unsigned() && j_->get<long long>() < 0) fail("expected a nonnegative integer");
    return j_->get<std::uint64_t>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::vector<double> numbers() const {
    array();
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back(item(i).number());
    return v;
  }
  std::vector<int> integers(long long lo, long long hi) const {
    array();
    std::vector<int> v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back(item(i).small_int(lo, hi));
    return v;
  }
  Point point() const {
    array();
    if (size() < 1 || size() > static_cast<std::size_t>(kMaxDim)) {
      fail("expected 1 to " + std::to_string(kMaxDim) + " coordinates");
    }
    Point x(static_cast<int>(size()));
    for (std::size_t i = 0; i < size(); ++i) x[static_cast<int>(i)] = item(i).number();
    return x;
  }

 private:
  const json* j_;
  std::string ptr_;
};

template <class F>
void optional_field(const Node& n, const char* key, F&& f) {
  if (n.has(key)) f(n.at(key));
}

int parse_dim(const Node& n) { return n.small_int(1, kMaxDim); }

// Rethrows a domain error from a constructor or validator as a config error.
template <class F>
auto at_pointer(const std::string& ptr, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(ptr, e.what());
  }
}

// {"n", "s" | "lambda"}: the Cantor ratio.
double parse_lambda(const Node& node, int n) {
  const bool has_s = node.has("s"), has_l = node.has("lambda");
  if (has_s == has_l) node.fail("give exactly one of \"s\" and \"lambda\"");
  if (has_s) {
    const Node sn = node.at("s");
    const double s = sn.positive();
    if (!(s < n)) sn.fail("dimension s must be below n = " + std::to_string(n));
    return std::exp2(-static_cast<double>(n) / s);
  }
  const Node ln = node.at("lambda");
  const double l = ln.positive();
  if (!(l < 0.5)) ln.fail("lambda must lie in (0, 0.5)");
  return l;
}

Weight parse_weight(const Node& node, int n_default) {
  if (!node.raw().is_object()) node.fail("expected an object");
  const std::string type = node.at("type").string();
  Weight w = Weight::constant(n_default);
  if (type == "constant") {
    node.object({"type", "n", "c"});
    const int n = node.has("n") ? parse_dim(node.at("n")) : n_default;
    const double c = node.has("c") ? node.at("c").positive() : 1.0;
    w = at_pointer(node.ptr(), [&] { return Weight::constant(n, c); });
  } else if (type == "radial_power") {
    node.object({"type", "eta", "center"});
    const double eta = node.at("eta").number();
    const Point c = node.has("center") ? node.at("center").point() : Point(n_default);
    w = at_pointer(node.ptr(), [&] { return Weight::radial_power(eta, c); });
  } else if (type == "dist_power") {
    node.object({"type", "cantor", "alpha", "gamma"});
    const Node cn = node.at("cantor");
    cn.object({"n", "s", "lambda", "generation"});
    CantorReference ref;
    ref.n = cn.has("n") ? parse_dim(cn.at("n")) : n_default;
    ref.lambda = parse_lambda(cn, ref.n);
    if (cn.has("generation")) ref.generation = cn.at("generation").small_int(0, 60);
    if (node.has("alpha") == node.has("gamma")) node.fail("give exactly one of \"alpha\" and \"gamma\"");
    double alpha = 0.0;
    if (node.has("alpha")) {
      alpha = node.at("alpha").number();
    } else {
      const double g = node.at("gamma").number();
      alpha = g * (ref.similarity_dimension() - ref.n);
    }
    w = at_pointer(node.ptr(), [&] { return Weight::dist_power(ref, alpha); });
  } else if (type == "cantor_distance") {
    node.object({"type", "n", "s", "gamma"});
    const int n = node.has("n") ? parse_dim(node.at("n")) : n_default;
    const Node sn = node.at("s");
    const double s = sn.positive();
    if (!(s < n)) sn.fail("dimension s must be below n = " + std::to_string(n));
    const double g = node.at("gamma").number();
    w = at_pointer(node.ptr(), [&] { return Weight::cantor_distance(n, s, g); });
  } else if (type == "product") {
    node.object({"type", "factors"});
    const Node fs = node.at("factors");
    fs.array();
    if (fs.size() == 0) fs.fail("expected at least one factor");
    std::vector<Weight> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) factors.push_back(parse_weight(fs.item(i), n_default));
    w = at_pointer(fs.ptr(), [&] { return Weight::product(std::move(factors)); });
  } else {
    node.at("type").fail("unknown weight type \"" + type + "\"");
  }
  if (const auto problem = w.integrability_problem()) node.fail(*problem);
  return w;
}

SetSpec parse_set(const Node& node) {
  if (!node.raw().is_object()) node.fail("expected an object");
  const std::string type = node.at("type").string();
  if (type == "cantor") {
    node.object({"type", "n", "s", "lambda", "generation"});
    const int n = parse_dim(node.at("n"));
    const double lambda = parse_lambda(node, n);
    const int k = node.has("generation") ? node.at("generation").small_int(0, 60) : 5;
    return CantorSet{at_pointer(node.ptr(), [&] { return CantorSpec(n, lambda, k); })};
  }
  if (type == "point") {
    node.object({"type", "x"});
    return PointSet{node.at("x").point()};
  }
  if (type == "segment") {
    node.object({"type", "a", "b"});
    SegmentSet s{node.at("a").point(), node.at("b").point()};
    if (s.a.dim() != s.b.dim()) node.at("b").fail("endpoint dimensions differ");
    if (s.a == s.b) node.at("b").fail("segment endpoints coincide");
    return s;
  }
  if (type == "atoms") {
    node.object({"type", "atoms"});
    const Node list = node.at("atoms");
    list.array();
    if (list.size() == 0) list.fail("expected at least one atom");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node a = list.item(i);
      Atom atom;
      if (a.raw().is_array()) {
        atom = {a.point(), 1.0};
      } else {
        a.object({"x", "m"});
        atom = {a.at("x").point(), a.has("m") ? a.at("m").positive() : 1.0};
      }
      if (!atoms.empty() && atom.x.dim() != atoms.front().x.dim()) a.fail("atom dimension differs from atom 0");
      atoms.push_back(atom);
    }
    return AtomSet{DiscreteMeasure(std::move(atoms))};
  }
  if (type == "ball") {
    node.object({"type", "center", "radius"});
    return BallSet{Ball(node.at("center").point(), node.at("radius").positive())};
  }
  node.at("type").fail("unknown set type \"" + type + "\"");
}

QuadratureConfig& quad_fields(const Node& b, QuadratureConfig& q, const char* rel_key) {
  optional_field(b, rel_key, [&](const Node& x) {
    q.rel_tol = x.positive();
    if (!(q.rel_tol < 1.0)) x.fail("tolerance must lie in (0, 1)");
  });
  return q;
}

void parse_budget(const Node& b, Budget& out) {
  b.object({"rel_tol", "frostman_rel_tol", "max_evals", "base_subdivisions", "max_depth", "k_extend", "point_levels",
            "segment_covers", "segment_atoms", "frostman_generations", "frostman_off_center", "capacity_ladder",
            "variant", "max_iterations", "rel_decrease", "window", "weight_cap", "ap_samples", "doubling_samples",
            "growth_radii", "seed", "enumeration_cap"});
  quad_fields(b, out.q, "rel_tol");
  quad_fields(b, out.frostman_q, "frostman_rel_tol");
  optional_field(b, "max_evals", [&](const Node& x) {
    out.q.max_evals = out.frostman_q.max_evals = static_cast<std::size_t>(x.small_int(1000, 1'000'000'000));
  });
  optional_field(b, "base_subdivisions", [&](const Node& x) {
    out.q.base_subdivisions = out.frostman_q.base_subdivisions = x.small_int(1, 64);
  });
  optional_field(b, "max_depth", [&](const Node& x) { out.q.max_depth = out.frostman_q.max_depth = x.small_int(1, 200); });
  optional_field(b, "k_extend", [&](const Node& x) { out.k_extend = x.small_int(0, 200); });
  optional_field(b, "point_levels", [&](const Node& x) { out.point_levels = x.small_int(1, 60); });
  optional_field(b, "segment_covers", [&](const Node& x) { out.segment_covers = x.integers(1, 1 << 20); });
  optional_field(b, "segment_atoms", [&](const Node& x) { out.segment_atoms = x.integers(1, 1 << 20); });
  optional_field(b, "frostman_generations", [&](const Node& x) { out.frostman_generations = x.integers(0, 20); });
  optional_field(b, "frostman_off_center", [&](const Node& x) { out.frostman_off_center = x.small_int(0, 1000); });
  optional_field(b, "capacity_ladder", [&](const Node& x) { out.capacity_ladder = x.integers(4, 4096); });
  optional_field(b, "variant", [&](const Node& x) {
    const std::string v = x.string();
    if (v == "sobolev") {
      out.variant = CapacityVariant::sobolev;
    } else if (v == "dirichlet") {
      out.variant = CapacityVariant::dirichlet;
    } else {
      x.fail("expected \"sobolev\" or \"dirichlet\"");
    }
  });
  optional_field(b, "max_iterations", [&](const Node& x) { out.solver.max_iterations = x.small_int(1, 100'000'000); });
  optional_field(b, "rel_decrease", [&](const Node& x) { out.solver.rel_decrease = x.positive(); });
  optional_field(b, "window", [&](const Node& x) { out.solver.window = x.small_int(1, 1'000'000); });
  optional_field(b, "weight_cap", [&](const Node& x) { out.solver.weight_cap = x.positive(); });
  optional_field(b, "ap_samples", [&](const Node& x) { out.ap_samples = x.small_int(1, 1'000'000); });
  optional_field(b, "doubling_samples", [&](const Node& x) { out.doubling_samples = x.small_int(1, 1'000'000); });
  optional_field(b, "growth_radii", [&](const Node& x) {
    out.growth_radii = x.numbers();
    for (std::size_t i = 0; i < out.growth_radii.size(); ++i) {
      if (!(out.growth_radii[i] > 0.0) || (i && !(out.growth_radii[i] > out.growth_radii[i - 1]))) {
        x.item(i).fail("radii must be positive and increasing");
      }
    }
  });
  optional_field(b, "seed", [&](const Node& x) { out.seed = out.q.seed = out.frostman_q.seed = x.unsigned_int(); });
  optional_field(b, "enumeration_cap", [&](const Node& x) {
    out.enumeration_cap = x.unsigned_int();
    if (out.enumeration_cap == 0) x.fail("expected a positive integer");
  });
  at_pointer(b.ptr(), [&] {
    out.validate();
    return 0;
  });
}

void parse_margins(const Node& m, Margins& out) {
  m.object({"decay_factor", "stability", "separation", "witness_slack", "witness_rate_tol", "null_ratio",
            "stable_tol", "log_ratio", "log_min_change"});
  optional_field(m, "decay_factor", [&](const Node& x) { out.decay_factor = x.number(); });
  optional_field(m, "stability", [&](const Node& x) { out.stability = x.number(); });
  optional_field(m, "separation", [&](const Node& x) { out.separation = x.number(); });
  optional_field(m, "witness_slack", [&](const Node& x) { out.witness_slack = x.number(); });
  optional_field(m, "witness_rate_tol", [&](const Node& x) { out.witness_rate_tol = x.positive(); });
  optional_field(m, "null_ratio", [&](const Node& x) { out.zero.null_ratio = x.number(); });
  optional_field(m, "stable_tol", [&](const Node& x) { out.zero.stable_tol = x.number(); });
  optional_field(m, "log_ratio", [&](const Node& x) { out.zero.log_ratio = x.positive(); });
  optional_field(m, "log_min_change", [&](const Node& x) { out.zero.log_min_change = x.positive(); });
  at_pointer(m.ptr(), [&] {
    out.validate();
    return 0;
  });
}

void parse_case(const Node& node, CaseSpec& c) {
  node.object({"p", "weight", "set"});
  c.set = parse_set(node.at("set"));
  const int n = set_dim(c.set);
  if (node.has("p")) {
    const Node pn = node.at("p");
    if (pn.raw().is_string()) {
      if (pn.string() != "inf") pn.fail("expected a number > 1 or \"inf\"");
      c.p = std::numeric_limits<double>::infinity();
    } else {
      c.p = pn.number();
      if (!(c.p > 1.0)) pn.fail("p must exceed 1");
    }
  }
  c.weight = node.has("weight") ? parse_weight(node.at("weight"), n) : Weight::constant(n);
  if (c.weight.dim() != n) {
    node.at("weight").fail("weight dimension " + std::to_string(c.weight.dim()) + " differs from set dimension " +
                           std::to_string(n));
  }
}

void parse_sweep(const Node& node, SweepSettings& s) {
  node.object({"n", "gammas", "dims", "k_max"});
  optional_field(node, "n", [&](const Node& x) { s.n = parse_dim(x); });
  optional_field(node, "gammas", [&](const Node& x) {
    s.gammas = x.numbers();
    for (std::size_t i = 0; i < s.gammas.size(); ++i) {
      if (!(s.gammas[i] >= 0.0 && s.gammas[i] < 1.0)) x.item(i).fail("gamma must lie in [0, 1)");
    }
  });
  optional_field(node, "dims", [&](const Node& x) {
    s.dims = x.numbers();
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
      if (!(s.dims[i] > 0.0 && s.dims[i] < s.n)) x.item(i).fail("dimension s must lie in (0, n)");
    }
  });
  if (!node.has("dims")) {
    for (double d : s.dims) {
      if (!(d < s.n)) node.fail("default dimensions need n >= 2; give \"dims\"");
    }
  }
  if (s.gammas.empty()) node.fail("expected at least one gamma");
  if (s.dims.empty()) node.fail("expected at least one dimension");
  optional_field(node, "k_max", [&](const Node& x) { s.k_max = x.small_int(1, 30); });
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::certify: return "certify";
    case Command::sweep: return "sweep";
    case Command::content: return "content";
    case Command::capacity: return "capacity";
    case Command::frostman: return "frostman";
    case Command::divcheck: return "divcheck";
    default: return "weight-info";
  }
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::certify, Command::sweep, Command::content, Command::capacity, Command::frostman,
                    Command::divcheck, Command::weight_info}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

Config parse_config(const std::string& text, std::optional<Command> cli_command) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  const Node root(j, "");
  root.object({"command", "case", "budget", "margins", "sweep", "content", "capacity", "divcheck", "weight_info"});
  Config c;
  if (root.has("command")) {
    const Node cn = root.at("command");
    const auto cmd = parse_command(cn.string());
    if (!cmd) cn.fail("unknown command \"" + cn.string() + "\"");
    if (cli_command && *cli_command != *cmd) {
      cn.fail("config command \"" + to_string(*cmd) + "\" differs from the requested \"" + to_string(*cli_command) +
              "\"");
    }
    c.command = *cmd;
  } else if (cli_command) {
    c.command = *cli_command;
  } else {
    root.at("command");
  }

  Budget budget;
  Margins margins;
  if (root.has("budget")) parse_budget(root.at("budget"), budget);
  if (root.has("margins")) parse_margins(root.at("margins"), margins);

  if (c.command == Command::sweep) {
    c.sweep.budget = budget;
    c.sweep.margins = margins;
    if (root.has("sweep")) parse_sweep(root.at("sweep"), c.sweep);
    return c;
  }

  const Node cn = root.at("case");
  parse_case(cn, c.spec);
  c.has_case = true;
  c.spec.budget = budget;
  c.spec.margins = margins;
  at_pointer("/case", [&] {
    c.spec.validate();
    return 0;
  });
  const bool ball = std::holds_alternative<BallSet>(c.spec.set);
  const int n = set_dim(c.spec.set);

  switch (c.command) {
    case Command::content:
    case Command::frostman:
      if (ball) cn.at("set").fail("ball sets are supported by the capacity commands only");
      break;
    case Command::divcheck:
      if (ball) cn.at("set").fail("divcheck needs a point, segment, atoms or Cantor set");
      if (n < 2) cn.at("set").fail("divcheck needs n >= 2");
      break;
    case Command::capacity:
      if (c.spec.infinite_p()) cn.at("p").fail("the capacity command needs a finite p");
      break;
    default: break;
  }

  if (root.has("content")) {
    const Node x = root.at("content");
    x.object({"ks", "write_cover"});
    optional_field(x, "ks", [&](const Node& k) { c.content.ks = k.integers(0, 200); });
    optional_field(x, "write_cover", [&](const Node& k) { c.content.write_cover = k.boolean(); });
  }
  if (root.has("capacity")) {
    const Node x = root.at("capacity");
    x.object({"write_field"});
    optional_field(x, "write_field", [&](const Node& k) { c.capacity.write_field = k.boolean(); });
  }
  if (root.has("divcheck")) {
    const Node x = root.at("divcheck");
    x.object({"base_radius"});
    optional_field(x, "base_radius", [&](const Node& k) { c.divcheck.base_radius = k.positive(); });
  }
  if (root.has("weight_info")) {
    const Node x = root.at("weight_info");
    x.object({"region"});
    optional_field(x, "region", [&](const Node& r) {
      r.object({"lo", "hi"});
      const Point lo = r.at("lo").point(), hi = r.at("hi").point();
      if (lo.dim() != n || hi.dim() != n) r.fail("region corners must have dimension " + std::to_string(n));
      for (int i = 0; i < n; ++i) {
        if (!(hi[i] > lo[i])) r.at("hi").fail("region must have positive extent on every axis");
      }
      c.weight_info.region = Box(lo, hi);
    });
  }
  return c;
}

Config load_config(const std::filesystem::path& path, std::optional<Command> cli_command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), cli_command);
}

void apply_seed(Config& c, std::uint64_t seed) {
  for (Budget* b : {&c.spec.budget, &c.sweep.budget}) {
    b->seed = seed;
    b->q.seed = seed;
    b->frostman_q.seed = seed;
  }
}

namespace {

std::string csv_text(const Table& t) {
  std::ostringstream os;
  write_table_csv(os, t);
  return os.str();
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

json p_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

json case_json(const CaseSpec& c) {
  return {{"p", p_json(c.p)}, {"n", set_dim(c.set)}, {"set", set_kind(c.set)}, {"weight", c.weight.describe()}};
}

json box_json(const Box& b) {
  json lo = json::array(), hi = json::array();
  for (int i = 0; i < b.dim(); ++i) {
    lo.push_back(b.lo[i]);
    hi.push_back(b.hi[i]);
  }
  return {{"lo", lo}, {"hi", hi}};
}

std::vector<Artifact> run_certify(const Config& cfg) {
  const Verdict v = certify(cfg.spec);
  json j;
  j["command"] = "certify";
  j["case"] = case_json(cfg.spec);
  j["outcome"] = to_string(v.outcome);
  j["branch"] = to_string(v.branch);
  j["statement"] = v.statement;
  j["evidence"] = json::array();
  for (const auto& e : v.evidence) {
    j["evidence"].push_back({{"name", e.name}, {"direction", e.direction}, {"value", e.value}, {"table", e.table}});
  }
  j["advisories"] = json::array();
  for (const auto& a : v.advisories) {
    j["advisories"].push_back({{"name", a.name}, {"value", a.value}, {"note", a.note}});
  }
  j["failure"] = v.failure ? json(*v.failure) : json(nullptr);
  std::vector<Artifact> out{{"verdict.json", json_text(j)}};
  for (const auto& t : v.tables) out.push_back({"evidence/" + t.name + ".csv", csv_text(t)});
  return out;
}

std::vector<Artifact> run_sweep(const Config& cfg) {
  const auto rows = sweep_cantor(cfg.sweep);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  bool signs = true, witness = true;
  int errors = 0;
  for (const auto& r : rows) {
    signs = signs && r.sign_agrees;
    witness = witness && r.witness_ok;
    errors += r.verdict == "error";
  }
  const json j = {{"command", "sweep"},   {"n", cfg.sweep.n},          {"k_max", cfg.sweep.k_max},
                  {"rows", rows.size()},  {"sign_agreement", signs},   {"witness_ok", witness},
                  {"errors", errors}};
  return {{"sweep.csv", os.str()}, {"sweep.json", json_text(j)}};
}

std::vector<Artifact> run_content(const Config& cfg) {
  const CaseSpec& c = cfg.spec;
  const Budget& b = c.budget;
  Table t{"content_curve", {"level", "delta", "upper_sum", "unconverged"}, {}};
  json j{{"command", "content"}, {"case", case_json(c)}};
  std::vector<int> ks;
  std::vector<double> vals;
  std::optional<Cover> last_cover;
  std::vector<double> last_h;
  const auto add = [&](int level, const ContentEstimate& e) {
    t.rows.push_back({static_cast<double>(level), e.delta, e.value, static_cast<double>(e.unconverged)});
    ks.push_back(level);
    vals.push_back(e.value);
  };
  if (const auto* cs = std::get_if<CantorSet>(&c.set)) {
    const CantorSpec& spec = cs->spec;
    ks = cfg.content.ks;
    if (ks.empty()) {
      for (int k = 0; k <= spec.generation(); ++k) ks.push_back(k);
    }
    const auto curve = content_upper_curve(c.weight, spec, ks, b.q, b.enumeration_cap);
    ks.clear();
    for (const auto& p : curve.points) add(p.k, p.estimate);
    j["exponent"] = curve.exponent ? json(*curve.exponent) : json(nullptr);
    if (const auto form = cantor_form(c.weight); form && form->lambda == spec.lambda()) {
      const double s = similarity_dimension(spec);
      const double gamma = form->alpha / (s - spec.dim());
      const auto pred = cantor_decay_exponent(spec.dim(), gamma, s);
      j["predicted_exponent"] = pred.exponent;
      j["threshold"] = pred.threshold;
      j["gamma"] = gamma;
    }
    if (cfg.content.write_cover) {
      const auto last = spec.at_generation(curve.points.back().k);
      if (last.cube_count(last.generation()) <= static_cast<double>(b.enumeration_cap)) {
        last_cover = canonical_cover(last, b.enumeration_cap);
        if (canonical_balls_congruent(c.weight, last)) {
          const double h = h_value(c.weight, representative_ball(last), b.q).value;
          last_h.assign(last_cover->balls.size(), h);
        } else {
          last_h = ball_h_values(c.weight, *last_cover, b.q);
        }
      }
    }
  } else if (const auto* sg = std::get_if<SegmentSet>(&c.set)) {
    std::vector<int> counts = cfg.content.ks.empty() ? b.segment_covers : cfg.content.ks;
    for (int N : counts) {
      if (N < 1) throw DomainError("segment cover sizes must be positive");
      const Cover cov = aligned_segment_cover(sg->a, sg->b, N);
      add(N, cover_sum(c.weight, cov, b.q));
      last_cover = cov;
    }
    if (last_cover && cfg.content.write_cover) last_h = ball_h_values(c.weight, *last_cover, b.q);
    std::vector<int> idx;
    for (std::size_t i = 0; i < ks.size(); ++i) idx.push_back(static_cast<int>(i));
    const auto e = fit_decay_exponent(idx, vals);
    j["exponent"] = e ? json(*e) : json(nullptr);
  } else {
    std::vector<Point> centers;
    if (const auto* p = std::get_if<PointSet>(&c.set)) centers.push_back(p->x);
    if (const auto* a = std::get_if<AtomSet>(&c.set)) {
      for (const auto& at : a->mu.atoms()) centers.push_back(at.x);
    }
    std::vector<int> levels = cfg.content.ks;
    if (levels.empty()) {
      for (int k = 0; k <= b.point_levels; ++k) levels.push_back(k);
    }
    for (int k : levels) {
      Cover cov;
      cov.delta = std::ldexp(1.0, -k);
      cov.provenance = "atom-balls";
      for (const auto& x : centers) cov.balls.emplace_back(x, cov.delta);
      add(k, cover_sum(c.weight, cov, b.q));
      last_cover = cov;
    }
    if (last_cover && cfg.content.write_cover) last_h = ball_h_values(c.weight, *last_cover, b.q);
    const auto e = fit_decay_exponent(ks, vals);
    j["exponent"] = e ? json(*e) : json(nullptr);
  }
  j["first"] = vals.front();
  j["final"] = vals.back();
  j["decay_ratio"] = vals.front() > 0.0 ? vals.back() / vals.front() : std::nan("");
  std::vector<Artifact> out{{"content.json", json_text(j)}, {"evidence/content_curve.csv", csv_text(t)}};
  if (last_cover && !last_h.empty()) {
    std::ostringstream os;
    write_cover_csv(os, *last_cover, last_h);
    out.push_back({"evidence/cover.csv", os.str()});
  }
  return out;
}

struct FrostmanLevel {
  double level;
  DiscreteMeasure mu;
  std::vector<Ball> balls;
};

std::vector<FrostmanLevel> frostman_levels(const CaseSpec& c) {
  const Budget& b = c.budget;
  std::vector<FrostmanLevel> out;
  BallSampleOptions opt;
  opt.off_center = b.frostman_off_center;
  opt.seed = b.seed;
  if (const auto* cs = std::get_if<CantorSet>(&c.set)) {
    const bool congruent = canonical_balls_congruent(c.weight, cs->spec.at_generation(1));
    for (int g : b.frostman_generations) {
      const auto mu = natural_measure(cs->spec.at_generation(g), b.enumeration_cap);
      auto balls = default_ball_sample(mu, opt);
      for (int k = 0; k <= g; ++k) {
        const auto sk = cs->spec.at_generation(k);
        if (congruent) {
          balls.push_back(representative_ball(sk));
        } else {
          const auto cov = canonical_cover(sk, b.enumeration_cap);
          balls.insert(balls.end(), cov.balls.begin(), cov.balls.end());
        }
      }
      out.push_back({static_cast<double>(g), mu, std::move(balls)});
    }
  } else if (const auto* sg = std::get_if<SegmentSet>(&c.set)) {
    for (int N : b.segment_atoms) {
      const auto mu = segment_measure(sg->a, sg->b, N);
      auto balls = default_ball_sample(mu, opt);
      for (int M : b.segment_covers) {
        const auto cov = aligned_segment_cover(sg->a, sg->b, M);
        balls.insert(balls.end(), cov.balls.begin(), cov.balls.end());
      }
      out.push_back({static_cast<double>(N), mu, std::move(balls)});
    }
  } else {
    DiscreteMeasure mu;
    if (const auto* p = std::get_if<PointSet>(&c.set)) mu = DiscreteMeasure({Atom{p->x, 1.0}});
    if (const auto* a = std::get_if<AtomSet>(&c.set)) mu = a->mu;
    const int levels = static_cast<int>(b.frostman_generations.size());
    for (int i = 0; i < levels; ++i) {
      const int j = b.point_levels - (levels - 1 - i);
      if (j < 0) continue;
      BallSampleOptions o = opt;
      o.r_min = std::ldexp(1.0, -j);
      o.r_max = std::max(1.0, mu.diameter());
      out.push_back({static_cast<double>(j), mu, default_ball_sample(mu, o)});
    }
  }
  return out;
}

std::vector<Artifact> run_frostman(const Config& cfg) {
  const CaseSpec& c = cfg.spec;
  Table t{"frostman", {"level", "atoms", "total", "C_hat", "lower_bound", "samples", "unconverged", "worst_radius"}, {}};
  json j{{"command", "frostman"}, {"case", case_json(c)}, {"levels", json::array()}};
  std::vector<double> lower;
  for (const auto& L : frostman_levels(c)) {
    const auto r = frostman_constant(L.mu, c.weight, L.balls, c.budget.frostman_q);
    t.rows.push_back({L.level, static_cast<double>(L.mu.size()), r.total, r.C_hat, r.lower_bound,
                      static_cast<double>(r.samples), static_cast<double>(r.unconverged), r.worst.radius});
    j["levels"].push_back({{"level", L.level}, {"lower_bound", r.lower_bound}, {"C_hat", r.C_hat}});
    lower.push_back(r.lower_bound);
  }
  if (lower.empty()) throw DomainError("no Frostman level fits the budget");
  j["lower_bound"] = lower.back();
  j["stable"] = lower.size() >= 2 && lower.back() > 0.0 &&
                std::abs(lower.back() - lower[lower.size() - 2]) <= c.margins.stability * lower.back();
  return {{"frostman.json", json_text(j)}, {"evidence/frostman.csv", csv_text(t)}};
}

std::vector<Artifact> run_capacity(const Config& cfg) {
  const CaseSpec& c = cfg.spec;
  const auto ladder = run_capacity_ladder(c);
  Table t{"capacity_ladder", {"resolution", "value", "converged", "iterations", "clamp_violations", "capped_cells"}, {}};
  json values = json::array(), res = json::array();
  bool converged = true;
  for (const auto& e : ladder.levels) {
    t.rows.push_back({static_cast<double>(e.resolution), e.value, e.converged ? 1.0 : 0.0,
                      static_cast<double>(e.iterations), static_cast<double>(e.clamp_violations),
                      static_cast<double>(e.capped_cells)});
    values.push_back(e.value);
    res.push_back(e.resolution);
    converged = converged && e.converged;
  }
  const json j{{"command", "capacity"},
               {"case", case_json(c)},
               {"p_conjugate", c.conjugate()},
               {"variant", to_string(c.budget.variant)},
               {"resolutions", res},
               {"values", values},
               {"zero_verdict", to_string(ladder.verdict)},
               {"converged", converged}};
  std::vector<Artifact> out{{"capacity.json", json_text(j)}, {"evidence/capacity_ladder.csv", csv_text(t)}};
  if (cfg.capacity.write_field) {
    std::ostringstream os;
    write_field_csv(os, ladder.levels.back().field);
    out.push_back({"evidence/capacity_field.csv", os.str()});
  }
  return out;
}

DiscreteMeasure divcheck_measure(const CaseSpec& c) {
  const Budget& b = c.budget;
  if (const auto* p = std::get_if<PointSet>(&c.set)) return DiscreteMeasure({Atom{p->x, 1.0}});
  if (const auto* a = std::get_if<AtomSet>(&c.set)) return a->mu;
  if (const auto* s = std::get_if<SegmentSet>(&c.set)) return segment_measure(s->a, s->b, b.segment_atoms.front());
  const auto& cs = std::get<CantorSet>(c.set);
  return natural_measure(cs.spec.at_generation(b.frostman_generations.front()), b.enumeration_cap);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::vector<Artifact> run_divcheck(const Config& cfg) {
  const CaseSpec& c = cfg.spec;
  const auto mu = divcheck_measure(c);
  const Box box = analysis_box(c.set);
  Point center(box.dim());
  double extent = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    center[i] = 0.5 * (box.lo[i] + box.hi[i]);
    extent = std::max(extent, box.extent(i));
  }
  const double base = cfg.divcheck.base_radius > 0.0 ? cfg.divcheck.base_radius : 0.5 * extent;
  const auto library = test_function_library(center, base);
  ShellConfig sc;
  sc.q = c.budget.q;
  struct Row {
    DivergenceCheck div;
    DualCheck dual;
  };
  const auto rows = parallel_map<Row>(library.size(), [&](std::size_t i) {
    return Row{verify_divergence(mu, library[i], sc), prop_dual_check(mu, c.weight, library[i], c.budget.q)};
  });
  std::ostringstream os;
  os.precision(17);
  os << "function,lhs,rhs,residual,converged,dual_lhs,dual_rhs,dual_ratio\n";
  double worst = 0.0, dual_max = 0.0;
  json fns = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << csv_quote(library[i].describe()) << "," << r.div.lhs << "," << r.div.rhs << "," << r.div.residual << ","
       << (r.div.converged ? 1 : 0) << "," << r.dual.lhs << "," << r.dual.rhs << "," << r.dual.ratio << "\n";
    worst = std::max(worst, r.div.residual);
    dual_max = std::max(dual_max, r.dual.ratio);
    fns.push_back({{"function", library[i].describe()}, {"residual", r.div.residual}, {"dual_ratio", r.dual.ratio}});
  }
  json j{{"command", "divcheck"},  {"case", case_json(c)},       {"atoms", mu.size()},
         {"functions", fns},       {"max_residual", worst},      {"max_dual_ratio", dual_max}};
  if (!c.infinite_p()) {
    double R = 0.0;
    for (const auto& a : mu.atoms()) R = std::max(R, norm(a.x));
    R = std::max(1.0, 2.0 * R);
    const auto e = riesz_energy(mu, c.weight, c.p, R, sc);
    j["riesz_energy"] = {{"R", R}, {"value", e.diverging ? json(nullptr) : json(e.value)}, {"diverging", e.diverging}};
  }
  return {{"divcheck.json", json_text(j)}, {"evidence/divcheck.csv", os.str()}};
}

std::vector<Artifact> run_weight_info(const Config& cfg) {
  const CaseSpec& c = cfg.spec;
  const Budget& b = c.budget;
  const Box region = cfg.weight_info.region ? *cfg.weight_info.region : analysis_box(c.set);
  const auto cd = estimate_doubling(c.weight, region, b.doubling_samples, b.q);
  const auto a1 = estimate_Ap(c.weight, 1.0, region, b.ap_samples, b.q);
  Point center(region.dim());
  for (int i = 0; i < region.dim(); ++i) center[i] = 0.5 * (region.lo[i] + region.hi[i]);
  const auto growth = check_growth(c.weight, center, b.growth_radii, b.q);
  json j{{"command", "weight-info"},
         {"weight", c.weight.describe()},
         {"n", c.weight.dim()},
         {"region", box_json(region)},
         {"C_D", cd.C_D},
         {"s_D", cd.s_D},
         {"A1", a1.infinite ? json("inf") : json(a1.constant)},
         {"A1_blowup", a1.infinite},
         {"growth", {{"trend", to_string(growth.trend)}, {"slope", growth.slope}}}};
  if (!c.infinite_p()) {
    const double pc = c.conjugate();
    const auto ap = estimate_Ap(c.weight.pow(pc - 1.0), pc, region, b.ap_samples, b.q);
    j["Ap_conjugate"] = ap.infinite ? json("inf") : json(ap.constant);
    j["p_conjugate"] = pc;
  }
  Table t{"growth", {"radius", "h"}, {}};
  for (std::size_t i = 0; i < growth.radii.size(); ++i) t.rows.push_back({growth.radii[i], growth.h[i]});
  return {{"weight_info.json", json_text(j)}, {"evidence/growth.csv", csv_text(t)}};
}

}  // namespace

std::vector<Artifact> execute(const Config& c) {
  switch (c.command) {
    case Command::certify: return run_certify(c);
    case Command::sweep: return run_sweep(c);
    case Command::content: return run_content(c);
    case Command::capacity: return run_capacity(c);
    case Command::frostman: return run_frostman(c);
    case Command::divcheck: return run_divcheck(c);
    default: return run_weight_info(c);
  }
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
  for (const auto& a : artifacts) {
    const auto path = dir / a.path;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << a.content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
}

int run_config(const std::filesystem::path& path, std::optional<Command> cli_command, const RunOptions& opt,
               std::ostream& log) {
  Config cfg;
  try {
    cfg = load_config(path, cli_command);
    if (opt.threads && *opt.threads < 1) throw ConfigError("", "--threads must be >= 1");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
  if (opt.seed) apply_seed(cfg, *opt.seed);
  try {
    ThreadScope threads(opt.threads.value_or(0));
    const auto artifacts = execute(cfg);
    write_artifacts(opt.out, artifacts);
    for (const auto& a : artifacts) log << "wrote " << (opt.out / a.path).string() << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace divcap
