#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "divcap/fractal.hpp"
#include "divcap/geometry.hpp"

namespace divcap {

class Weight;

struct ConstantWeight {
  double c = 1.0;
};

/// |x - center|^eta
struct RadialPowerWeight {
  double eta = 0.0;
  Point center;
};

/// The Cantor set a distance weight refers to. Without a generation the
/// weight measures the distance to the limit set E; with one, to E_k.
struct CantorReference {
  int n = 1;
  double lambda = 0.25;
  std::optional<int> generation;

  double similarity_dimension() const;
};

/// dist(x, set)^alpha
struct DistPowerWeight {
  CantorReference set;
  double alpha = 0.0;
};

struct ProductWeight {
  std::vector<Weight> factors;
};

/// w(x) = coef * |x - c|^eta on balls centered at c.
struct RadialForm {
  double coef = 1.0;
  double eta = 0.0;
};

/// Symbolic weight on R^n with pointwise evaluation. Values may be +inf on
/// the singular set of a negative-exponent factor.
class Weight {
 public:
  using Kind = std::variant<ConstantWeight, RadialPowerWeight, DistPowerWeight, ProductWeight>;

  static Weight constant(int n, double c = 1.0);
  static Weight radial_power(double eta, const Point& center);
  static Weight dist_power(const CantorReference& set, double alpha);
  /// dist(x, E)^{gamma (s - n)} for the limit set with similarity dimension s.
  static Weight cantor_distance(int n, double s, double gamma);
  static Weight product(std::vector<Weight> factors);

  int dim() const { return n_; }
  const Kind& kind() const { return kind_; }

  /// eval_weight: checks the dimension.
  double operator()(const Point& x) const;
  double eval_unchecked(const Point& x) const;

  /// w^t, computed symbolically.
  Weight pow(double t) const;

  /// Closed-form description when the weight is radial about c.
  std::optional<RadialForm> radial_form_about(const Point& c) const;

  /// Empty when the weight is locally integrable near every point, else the
  /// reason it is not.
  std::optional<std::string> integrability_problem() const;

  /// True when translating a generation-j cube of `spec` onto another leaves
  /// the weight on its circumscribed ball unchanged (constant factors and
  /// distances to the same limit set).
  bool congruent_on_cantor_cubes(const CantorSpec& spec) const;

  std::string describe() const;

 private:
  Weight(int n, Kind kind);
  int n_ = 1;
  Kind kind_;
};

}  // namespace divcap
