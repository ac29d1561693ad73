#include "divcap/fractal.hpp"

#include <algorithm>
#include <limits>

namespace divcap {

namespace {

struct Node {
  Point anchor;
  double side;
  int depth;
};

// Children of a cube, nearest-to-x first so that pruning kicks in early.
int push_children(const Point& x, const Node& node, double lambda, std::vector<Node>& stack) {
  const int n = x.dim();
  const int count = 1 << n;
  const double child = node.side * lambda;
  const double shift = node.side - child;
  std::array<std::pair<double, Node>, 16> kids;
  for (int b = 0; b < count; ++b) {
    Point a = node.anchor;
    for (int i = 0; i < n; ++i) {
      if ((b >> (n - 1 - i)) & 1) a[i] += shift;
    }
    kids[b] = {distance_to_box(x, a, child), Node{a, child, node.depth + 1}};
  }
  std::stable_sort(kids.begin(), kids.begin() + count,
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  // Farthest pushed first, nearest popped first.
  for (int b = count - 1; b >= 0; --b) stack.push_back(kids[b].second);
  return count;
}

double nearest_corner_distance(const Point& x, const Point& anchor, double side) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double lo = anchor[i];
    const double hi = anchor[i] + side;
    const double d = std::min(std::abs(x[i] - lo), std::abs(x[i] - hi));
    s += d * d;
  }
  return std::sqrt(s);
}

Point unit_origin(int n) { return Point(n); }

}  // namespace

CantorSpec::CantorSpec(int n, double lambda, int generation) : n_(n), lambda_(lambda), k_(generation) {
  require_dim(n);
  if (!(lambda > 0.0 && lambda < 0.5)) throw DomainError("Cantor ratio lambda must lie in (0, 1/2)");
  if (generation < 0) throw DomainError("Cantor generation must be >= 0");
}

CantorSpec CantorSpec::from_dimension(int n, double s, int generation) {
  require_dim(n);
  if (!(s > 0.0 && s < n)) throw DomainError("similarity dimension s must lie in (0, n)");
  return CantorSpec(n, std::exp2(-static_cast<double>(n) / s), generation);
}

double CantorSpec::side(int j) const { return std::pow(lambda_, j); }

double CantorSpec::cube_count(int j) const { return std::exp2(static_cast<double>(j) * n_); }

double CantorSpec::gap(int j) const {
  if (j < 1) return std::numeric_limits<double>::infinity();
  return side(j - 1) - 2.0 * side(j);
}

Point Cube::center() const {
  Point c = anchor;
  for (int i = 0; i < c.dim(); ++i) c[i] += 0.5 * side;
  return c;
}

std::vector<Cube> generate_cubes(const CantorSpec& spec, std::uint64_t cap) {
  const int n = spec.dim();
  const int k = spec.generation();
  if (static_cast<double>(k) * n > 62.0 || spec.cube_count(k) > static_cast<double>(cap)) {
    throw DomainError("Cantor enumeration cap exceeded: 2^(k n) = 2^" + std::to_string(k * n));
  }
  std::vector<Cube> cubes{Cube{unit_origin(n), 1.0}};
  const int children = 1 << n;
  for (int level = 1; level <= k; ++level) {
    std::vector<Cube> next;
    next.reserve(cubes.size() * static_cast<std::size_t>(children));
    for (const auto& q : cubes) {
      const double child = q.side * spec.lambda();
      const double shift = q.side - child;
      for (int b = 0; b < children; ++b) {
        Point a = q.anchor;
        for (int i = 0; i < n; ++i) {
          if ((b >> (n - 1 - i)) & 1) a[i] += shift;
        }
        next.push_back(Cube{a, child});
      }
    }
    cubes = std::move(next);
  }
  return cubes;
}

double dist_to_set(const CantorSpec& spec, const Point& x) {
  require_same_dim(spec.dim(), x.dim(), "dist_to_set");
  thread_local std::vector<Node> stack;
  stack.clear();
  stack.push_back(Node{unit_origin(spec.dim()), 1.0, 0});
  double best = std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    const double lb = distance_to_box(x, node.anchor, node.side);
    if (lb >= best) continue;
    if (node.depth == spec.generation()) {
      best = lb;
      continue;
    }
    push_children(x, node, spec.lambda(), stack);
  }
  return best;
}

double dist_to_limit_set(int n, double lambda, const Point& x, double rel_tol) {
  require_same_dim(n, x.dim(), "dist_to_limit_set");
  thread_local std::vector<Node> stack;
  stack.clear();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  stack.push_back(Node{unit_origin(n), 1.0, 0});
  double best = std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    const double lb = distance_to_box(x, node.anchor, node.side);
    if (lb >= best * (1.0 - rel_tol)) continue;
    best = std::min(best, nearest_corner_distance(x, node.anchor, node.side));
    // Cube corners lie in E, so the cube's distance range is [lb, lb + diam].
    if (node.side * sqrt_n <= rel_tol * best || node.side < 1e-300) continue;
    push_children(x, node, lambda, stack);
  }
  return best;
}

DiscreteMeasure natural_measure(const CantorSpec& spec, std::uint64_t cap) {
  const auto cubes = generate_cubes(spec, cap);
  const double mass = std::exp2(-static_cast<double>(spec.generation()) * spec.dim());
  std::vector<Atom> atoms;
  atoms.reserve(cubes.size());
  for (const auto& q : cubes) atoms.push_back({q.center(), mass});
  return DiscreteMeasure(std::move(atoms));
}

double similarity_dimension(const CantorSpec& spec) {
  return spec.dim() * std::log(2.0) / std::log(1.0 / spec.lambda());
}

}  // namespace divcap
