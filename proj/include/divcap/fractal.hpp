#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divcap/geometry.hpp"
#include "divcap/measure.hpp"

namespace divcap {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Self-similar corner Cantor set in [0,1]^n with constant ratio lambda:
/// each cube is replaced by the 2^n subcubes of relative side lambda that
/// share a vertex with it. `generation` selects the working level E_k.
class CantorSpec {
 public:
  CantorSpec(int n, double lambda, int generation);
  /// lambda = 2^{-n/s}.
  static CantorSpec from_dimension(int n, double s, int generation);

  int dim() const { return n_; }
  double lambda() const { return lambda_; }
  int generation() const { return k_; }
  CantorSpec at_generation(int k) const { return CantorSpec(n_, lambda_, k); }

  /// Side of a generation-j cube, lambda^j.
  double side(int j) const;
  /// 2^{jn}.
  double cube_count(int j) const;
  /// Smallest distance between two distinct generation-j cubes (j >= 1).
  double gap(int j) const;

 private:
  int n_;
  double lambda_;
  int k_;
};

struct Cube {
  Point anchor;  // min corner
  double side = 0.0;

  Point center() const;
};

/// The 2^{kn} generation-k cubes, ordered lexicographically by their
/// corner-choice string (first generation most significant, axis 0 first).
std::vector<Cube> generate_cubes(const CantorSpec& spec,
                                 std::uint64_t cap = kDefaultEnumerationCap);

/// Exact dist(x, E_k) for the spec's generation k (branch and bound, no
/// enumeration). Lower bound for dist(x, E) within sqrt(n) * side(k).
double dist_to_set(const CantorSpec& spec, const Point& x);

/// dist(x, E) to the limit set, to relative precision rel_tol. Cube corners
/// belong to E, so every visited cube supplies an upper bound.
double dist_to_limit_set(int n, double lambda, const Point& x, double rel_tol = 1e-9);

/// One atom of mass 2^{-kn} at each generation-k cube center.
DiscreteMeasure natural_measure(const CantorSpec& spec,
                                std::uint64_t cap = kDefaultEnumerationCap);

/// n ln 2 / ln(1/lambda).
double similarity_dimension(const CantorSpec& spec);

}  // namespace divcap
