#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "divcap/capacity.hpp"
#include "divcap/content.hpp"
#include "divcap/fractal.hpp"
#include "divcap/measure.hpp"
#include "divcap/quadrature.hpp"
#include "divcap/weight.hpp"

namespace divcap {

struct CantorSet {
  CantorSpec spec;  ///< generation = k_max of the enumerated ladder
};
struct PointSet {
  Point x;
};
struct SegmentSet {
  Point a, b;
};
/// Finite set of points (the atom masses are used by the Frostman ladder).
struct AtomSet {
  DiscreteMeasure mu;
};
/// Closed ball; capacity branch only.
struct BallSet {
  Ball ball;
};

using SetSpec = std::variant<CantorSet, PointSet, SegmentSet, AtomSet, BallSet>;

int set_dim(const SetSpec& s);
std::string set_kind(const SetSpec& s);
/// Cube about the set with at least 25% padding on every side (half-width
/// max(1, 1.25 * extent)); the capacity grid and advisory sampling region.
Box analysis_box(const SetSpec& s);

struct Budget {
  QuadratureConfig q{.rel_tol = 1e-3};
  QuadratureConfig frostman_q{.rel_tol = 1e-2};  ///< Frostman ratios need only a few digits
  int k_extend = 32;           ///< content ladder length when a representative ball suffices
  int point_levels = 12;       ///< halvings of the point/atom cover radius
  std::vector<int> segment_covers{1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<int> segment_atoms{16, 32, 64};
  std::vector<int> frostman_generations{1, 2, 3};
  int frostman_off_center = 10;
  std::vector<int> capacity_ladder{16, 32, 64};
  CapacityVariant variant = CapacityVariant::sobolev;
  SolverConfig solver;
  std::size_t ap_samples = 32;
  std::size_t doubling_samples = 32;
  std::vector<double> growth_radii{1.0, 3.0, 10.0, 30.0, 100.0};
  std::uint64_t seed = 0x5eed;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;

  void validate() const;
};

struct Margins {
  double decay_factor = 1e-3;  ///< removable: final upper value below this fraction of the first
  double stability = 0.10;     ///< Frostman lower bounds agree within this fraction
  double separation = 10.0;    ///< Frostman bound must exceed separation * decay_factor * first upper value
  double witness_slack = 1.05;
  double witness_rate_tol = 0.1;
  ZeroVerdictOptions zero;

  void validate() const;
};

struct CaseSpec {
  double p = std::numeric_limits<double>::infinity();
  Weight weight = Weight::constant(2);
  SetSpec set = PointSet{Point(2)};
  Budget budget;
  Margins margins;

  bool infinite_p() const { return std::isinf(p); }
  /// p / (p - 1); 1 for p = inf.
  double conjugate() const;
  void validate() const;
};

/// p' = p / (p - 1), exact for the representable inputs.
double conjugate_exponent(double p);

enum class Outcome { removable, non_removable, inconclusive };
enum class Branch { hausdorff, capacity };
std::string to_string(Outcome o);
std::string to_string(Branch b);

struct EvidenceRef {
  std::string name;
  std::string direction;  ///< "upper", "lower", "estimate"
  double value = 0.0;
  std::string table;  ///< evidence table holding the series, if any
};

/// A numeric table written as evidence/<name>.csv.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table_csv(std::ostream& os, const Table& t);

struct Advisory {
  std::string name;
  double value = 0.0;
  std::string note;
};

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  Branch branch = Branch::hausdorff;
  std::vector<EvidenceRef> evidence;
  std::vector<Advisory> advisories;
  std::vector<Table> tables;
  std::optional<std::string> failure;
  std::string statement;
};

/// Evidence fired both the removable and the non-removable criterion, or a
/// refinement flipped a definite verdict.
class ContradictionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

Verdict certify(const CaseSpec& c);

struct CapacityLadder {
  std::vector<CapacityEstimate> levels;  ///< one per budget resolution; only the last keeps its field
  ZeroVerdict verdict = ZeroVerdict::undecided;
};

/// Capacity of the set for weight w^{p'-1} and exponent p' on the budget's
/// grid ladder (warm-started), with the zero verdict of the values.
CapacityLadder run_capacity_ladder(const CaseSpec& c);

struct SweepSettings {
  int n = 2;
  std::vector<double> gammas{0.0, 0.25, 0.5};
  std::vector<double> dims{0.4, 0.5, 2.0 / 3.0, 1.0};
  int k_max = 5;
  Budget budget;
  Margins margins;
};

struct SweepRow {
  double gamma = 0.0, s = 0.0;
  double predicted = 0.0;
  double empirical = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  std::string verdict;  ///< outcome, or "error"
  std::string error;
  bool sign_agrees = true;  ///< vacuous when |predicted| <= 0.2
  double frostman_lower = std::numeric_limits<double>::quiet_NaN();
  double witness_C_D = std::numeric_limits<double>::quiet_NaN();
  double witness_max_ratio = std::numeric_limits<double>::quiet_NaN();  ///< max_k norm / (C_D sum h)
  double witness_exponent = std::numeric_limits<double>::quiet_NaN();
  bool witness_ok = false;
};

std::vector<SweepRow> sweep_cantor(const SweepSettings& cfg);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace divcap
