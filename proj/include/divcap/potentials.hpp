#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "divcap/capacity.hpp"
#include "divcap/content.hpp"
#include "divcap/measure.hpp"
#include "divcap/quadrature.hpp"
#include "divcap/test_function.hpp"
#include "divcap/weight.hpp"

namespace divcap {

/// sum over atoms with |x - a| < R of m |x - a|^{1-n}; +inf at an atom (n >= 2).
double riesz_potential(const DiscreteMeasure& mu, const Point& x,
                       double R = std::numeric_limits<double>::infinity());

/// c(n) = 1 / (n omega_n)
double newton_constant(int n);

/// c(n) sum m (x - a) / |x - a|^n. Throws at an atom.
Point div_field_eval(const DiscreteMeasure& mu, const Point& x);

/// Settings for integrals with point singularities at atoms: the region minus
/// small balls around the atoms is integrated directly, each small ball by
/// dyadic shells in atom-local offsets.
struct ShellConfig {
  QuadratureConfig q;
  double near_fraction = 0.25;  ///< near-ball radius relative to min(spacing, region radius)
  double shell_tol = 1e-5;      ///< stop once the extrapolated tail is below this fraction
  int max_shells = 400;
  int grid_resolution = 64;  ///< node grid for sup norms
};

struct SingularResult {
  double value = 0.0;
  bool diverging = false;
  bool converged = true;
  std::vector<double> shells;  ///< shell contributions summed over atoms, outermost first
  std::size_t evals = 0;
};

/// int (I_{1,3R} mu)^p / w over B(0, 3.03 R). Requires supp mu in B(0, R).
/// Diverging when shell contributions stop decreasing over two halvings.
SingularResult riesz_energy(const DiscreteMeasure& mu, const Weight& w, double p, double R,
                            const ShellConfig& cfg = {});

struct DivergenceCheck {
  double lhs = 0.0;  ///< -int v . grad phi
  double rhs = 0.0;  ///< sum m phi(a)
  double residual = 0.0;  ///< |lhs - rhs| / max(1, |rhs|)
  std::size_t evals = 0;
  bool converged = true;
};

DivergenceCheck verify_divergence(const DiscreteMeasure& mu, const TestFunction& phi, const ShellConfig& cfg = {});

class VectorFieldSpec {
 public:
  enum class Kind { riesz_of_measure, grid_sampled };

  static VectorFieldSpec riesz_of_measure(DiscreteMeasure mu, int n);
  static VectorFieldSpec grid_sampled(std::vector<GridField> components);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  Point operator()(const Point& x) const;
  const DiscreteMeasure& measure() const { return mu_; }
  const std::vector<GridField>& components() const { return comps_; }

 private:
  Kind kind_ = Kind::riesz_of_measure;
  int n_ = 1;
  DiscreteMeasure mu_;
  std::vector<GridField> comps_;
};

/// p finite: (int_domain |v|^p / w)^{1/p}. p = inf: sup over grid nodes and
/// atom shells of |v| / w; diverging when the shell sup keeps growing.
SingularResult weighted_norm(const VectorFieldSpec& v, const Weight& w, double p, const Box& domain,
                             const ShellConfig& cfg = {});

struct WitnessCutoff {
  Cover cover;
  double gradient_norm = 0.0;  ///< measured ||grad chi||_{1,w}, max-combination
  double sum_bound = 0.0;      ///< sum_j (1/r_j) int_{annulus_j} w
  double h_sum = 0.0;          ///< sum_j h(B_j)
  double local_doubling = 1.0;  ///< max over the cover of int_{2B} w / int_B w
  bool fallback = false;       ///< measured norm replaced by the sum bound
  bool representative = false;
};

/// chi = max_j clamp((2 r_j - |x - x_j|) / r_j, 0, 1)
double witness_value(const Cover& c, const Point& x);

WitnessCutoff build_witness(const Cover& cover, const Weight& w, const QuadratureConfig& q);

/// Witness on the canonical Cantor cover; a single representative ball when
/// doubled balls are congruent and disjoint.
WitnessCutoff build_canonical_witness(const Weight& w, const CantorSpec& spec, const QuadratureConfig& q,
                                      std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace divcap
