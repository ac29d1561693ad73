#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "divcap/quadrature.hpp"
#include "divcap/weight.hpp"

namespace divcap {

/// Radical-inverse (Halton) coordinate of index i in the given prime base.
double radical_inverse(std::uint64_t i, int base);

/// Deterministic ball sample: Halton centers in the region, radii
/// log-uniform in [1e-3 * diam, diam].
std::vector<Ball> halton_balls(const Box& region, std::size_t count);

struct DoublingEstimate {
  double C_D = 1.0;
  double s_D = 0.0;  ///< log2(C_D)
  std::size_t samples = 0;
  Box region;
  Ball worst;
  std::size_t unconverged = 0;  ///< integrals that missed the tolerance
};

/// Sampled sup of int_{B(x,2r)} w / int_{B(x,r)} w. A lower bound for the
/// true doubling constant.
DoublingEstimate estimate_doubling(const Weight& w, const Box& region, std::size_t n_samples,
                                   const QuadratureConfig& q);
DoublingEstimate estimate_doubling_serial(const Weight& w, const Box& region,
                                          std::size_t n_samples, const QuadratureConfig& q);
/// Doubling ratio of a single ball.
double doubling_ratio(const Weight& w, const Ball& b, const QuadratureConfig& q);

struct ApOptions {
  double blowup_threshold = 1e6;
  int zoom_levels = 48;  ///< refinement steps of the ess inf search (p = 1)
};

struct ApEstimate {
  double constant = 1.0;  ///< sampled sup, >= 1 by Jensen; +inf when flagged
  bool infinite = false;
  std::size_t samples = 0;
  Ball worst;
};

/// A_p product of one ball. p == 1 uses (avg w) * ess sup(1/w), the ess sup
/// taken over quadrature nodes and a zoom search about the smallest node.
/// `previous` receives the product one refinement step earlier.
double ap_product(const Weight& w, double p, const Ball& b, const QuadratureConfig& q,
                  const ApOptions& opt = {}, double* previous = nullptr);

ApEstimate estimate_Ap(const Weight& w, double p, const Box& region, std::size_t n_samples,
                       const QuadratureConfig& q, const ApOptions& opt = {});
/// Same, on an explicit ball list.
ApEstimate estimate_Ap_on(const Weight& w, double p, const std::vector<Ball>& balls,
                          const QuadratureConfig& q, const ApOptions& opt = {});

enum class GrowthTrend { diverging, bounded, undecided };
std::string to_string(GrowthTrend t);

struct GrowthReport {
  GrowthTrend trend = GrowthTrend::undecided;
  double slope = 0.0;  ///< fitted d log h / d log r over the largest decade
  std::vector<double> radii;
  std::vector<double> h;
};

/// Trend of r -> h(B(x, r)) for large r.
GrowthReport check_growth(const Weight& w, const Point& x, const std::vector<double>& radii,
                          const QuadratureConfig& q, double slope_margin = 0.1);

/// Geometric ladder r0, r0*f, ..., up to r1 inclusive.
std::vector<double> log_spaced(double r0, double r1, int count);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace divcap
