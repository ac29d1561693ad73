#pragma once

#include <cstdint>
#include <vector>

#include "divcap/measure.hpp"
#include "divcap/quadrature.hpp"
#include "divcap/test_function.hpp"
#include "divcap/weight.hpp"

namespace divcap {

struct FrostmanReport {
  double C_hat = 0.0;  ///< sampled sup of mu(B) / h(B)
  Ball worst;
  std::size_t samples = 0;
  double lower_bound = 0.0;  ///< total / C_hat
  double total = 0.0;
  std::size_t unconverged = 0;
};

struct BallSampleOptions {
  int off_center = 10;  ///< random off-center balls per atom
  double r_min = 0.0;   ///< 0: nearest-neighbour spacing
  double r_max = 0.0;   ///< 0: set diameter
  std::uint64_t seed = 0x5eed;
};

/// Dyadic radius ladder r_min * 2^j up to the first value >= r_max.
std::vector<double> dyadic_radii(double r_min, double r_max);

/// Balls centered at every atom with the dyadic ladder of radii, plus
/// off-center balls (uniform offset inside the ball, ladder radius).
std::vector<Ball> default_ball_sample(const DiscreteMeasure& mu, const BallSampleOptions& opt = {});

FrostmanReport frostman_constant(const DiscreteMeasure& mu, const Weight& w, const std::vector<Ball>& balls,
                                 const QuadratureConfig& q);
FrostmanReport frostman_constant_serial(const DiscreteMeasure& mu, const Weight& w,
                                        const std::vector<Ball>& balls, const QuadratureConfig& q);

struct DualCheck {
  double lhs = 0.0;  ///< sum of mass * |phi(atom)|
  double rhs = 0.0;  ///< integral of |grad phi| w
  double ratio = 0.0;
};

DualCheck prop_dual_check(const DiscreteMeasure& mu, const Weight& w, const TestFunction& phi,
                          const QuadratureConfig& q);

}  // namespace divcap
