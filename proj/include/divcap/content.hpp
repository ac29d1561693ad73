#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "divcap/fractal.hpp"
#include "divcap/quadrature.hpp"
#include "divcap/weight.hpp"

namespace divcap {

enum class BoundDirection { upper, lower };
std::string to_string(BoundDirection d);

struct Cover {
  std::vector<Ball> balls;
  double delta = std::numeric_limits<double>::infinity();
  std::string provenance;
  bool budget_exhausted = false;
};

struct ContentEstimate {
  double value = 0.0;
  BoundDirection direction = BoundDirection::upper;
  double delta = std::numeric_limits<double>::infinity();
  std::string provenance;
  std::size_t unconverged = 0;  ///< ball integrals that missed the tolerance
};

/// One ball per generation-k cube: cube center, radius sqrt(n) * side / 2.
Cover canonical_cover(const CantorSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// N balls of radius |b - a| / (2N) centered at the midpoints of the N equal
/// pieces of the segment [a, b].
Cover aligned_segment_cover(const Point& a, const Point& b, int n_balls);

/// True when every sample point lies in some (open) ball of the cover.
bool covers(const Cover& c, const std::vector<Point>& sample);

/// Sum of h(B) over the cover.
ContentEstimate cover_sum(const Weight& w, const Cover& c, const QuadratureConfig& q);
ContentEstimate cover_sum_serial(const Weight& w, const Cover& c, const QuadratureConfig& q);

/// h of every ball, in cover order.
std::vector<double> ball_h_values(const Weight& w, const Cover& c, const QuadratureConfig& q);

/// The generation-k canonical ball around the cube anchored at the origin.
Ball representative_ball(const CantorSpec& spec);

/// True when every canonical ball of the spec sees the same weight
/// configuration up to translation, so a single ball represents the cover.
/// `reach` is the radius multiple that must stay clear of other cubes
/// (1 for the ball itself, 2 for its double).
bool canonical_balls_congruent(const Weight& w, const CantorSpec& spec, double reach = 1.0);

/// Canonical cover sum. Uses 2^{kn} h(representative) when the balls are
/// congruent, enumeration otherwise.
ContentEstimate canonical_cover_sum(const Weight& w, const CantorSpec& spec,
                                    const QuadratureConfig& q,
                                    std::uint64_t cap = kDefaultEnumerationCap);

struct GreedyOptions {
  std::size_t budget = 100000;  ///< max greedy picks before the fallback
  /// Extra candidate balls (radii above delta are ignored).
  std::vector<Ball> extra_candidates;
};

/// Budgeted greedy cover of the sample with radii from {delta, delta/2,
/// delta/4, delta/8}, minimizing h(B) per newly covered sample point.
Cover greedy_cover(const Weight& w, const std::vector<Point>& sample, double delta,
                   const QuadratureConfig& q, const GreedyOptions& opt = {});

struct DecayPrediction {
  double exponent = 0.0;
  double threshold = 0.0;
  bool removable_predicted = false;
};

/// exponent = (1-gamma) n^2/s - n/s + (gamma-1) n, threshold = n - 1/(1-gamma).
DecayPrediction cantor_decay_exponent(int n, double gamma, double s);

struct CurvePoint {
  int k = 0;
  ContentEstimate estimate;
};

struct ContentCurve {
  std::vector<CurvePoint> points;
  /// -(fitted slope of log2 sum against k) over the top half of the ladder;
  /// empty with fewer than two points.
  std::optional<double> exponent;
};

ContentCurve content_upper_curve(const Weight& w, const CantorSpec& spec,
                                 const std::vector<int>& k_range, const QuadratureConfig& q,
                                 std::uint64_t cap = kDefaultEnumerationCap);

/// Decay exponent fitted on the top half of (k, value) pairs.
std::optional<double> fit_decay_exponent(const std::vector<int>& k, const std::vector<double>& v);

void write_cover_csv(std::ostream& os, const Cover& c, const std::vector<double>& h);
void write_curve_csv(std::ostream& os, const ContentCurve& curve);

}  // namespace divcap
