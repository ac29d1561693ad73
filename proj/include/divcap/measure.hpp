#pragma once

#include <vector>

#include "divcap/geometry.hpp"

namespace divcap {

struct Atom {
  Point x;
  double m = 0.0;
};

/// Finite nonnegative atomic measure. The total mass is recomputed with
/// compensated summation whenever atoms change.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total() const { return total_; }
  /// Ambient dimension (0 for the empty measure).
  int dim() const { return atoms_.empty() ? 0 : atoms_.front().x.dim(); }

  DiscreteMeasure scaled(double t) const;
  /// Union of the atom lists.
  DiscreteMeasure operator+(const DiscreteMeasure& other) const;

  /// Smallest pairwise atom distance (+inf with fewer than two atoms).
  double min_spacing() const;
  /// Largest pairwise atom distance (0 with fewer than two atoms).
  double diameter() const;

 private:
  std::vector<Atom> atoms_;
  double total_ = 0.0;
};

/// Uniform measure on n_atoms midpoints of the segment [a, b] with total mass
/// equal to its length.
DiscreteMeasure segment_measure(const Point& a, const Point& b, int n_atoms);

/// Mass of atoms strictly inside the open ball.
double measure_of_ball(const DiscreteMeasure& mu, const Ball& ball);

}  // namespace divcap
