#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

#include "divcap/geometry.hpp"
#include "divcap/weight.hpp"

namespace divcap {

/// Quadrature settings shared by every ball and annulus integral.
struct QuadratureConfig {
  int base_subdivisions = 4;  ///< cells per axis of the initial parameter grid
  int max_depth = 40;         ///< bisection depth limit of a single cell
  double rel_tol = 1e-4;
  std::size_t max_evals = 4'000'000;
  std::uint64_t seed = 0x5eed;  ///< for randomized ball samples built on top

  void validate() const;
};

/// Raised when an integral cannot be formed (non-integrable configuration or
/// an infinite integrand value at a node). Carries the offending ball.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::optional<Ball> ball = std::nullopt)
      : std::runtime_error(what), ball_(std::move(ball)) {}
  const std::optional<Ball>& ball() const { return ball_; }

 private:
  std::optional<Ball> ball_;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evals = 0;
  bool converged = true;
  bool closed_form = false;
  /// Extremes of the weight over the evaluation nodes (weight integrals only;
  /// exact for closed-form radial weights).
  double min_sample = 0.0;
  double max_sample = 0.0;
  Point argmin;
};

using Integrand = std::function<double(const Point&)>;

/// Global adaptive tensor Gauss-Legendre cubature over [0,1]^d; g receives
/// the parameter point. Regions with the largest local error (|parent rule -
/// sum of children rules|) are bisected first.
QuadResult adaptive_cubature(int d, const std::function<double(const double*)>& g,
                             const QuadratureConfig& q);

/// Integral of f over the annulus r_inner <= |x - c| <= r_outer, in
/// hyperspherical coordinates about c (the ball is r_inner = 0).
QuadResult integrate_annulus(const Point& c, double r_inner, double r_outer, const Integrand& f,
                             const QuadratureConfig& q);
QuadResult integrate_ball_fn(const Ball& b, const Integrand& f, const QuadratureConfig& q);
QuadResult integrate_box_fn(const Box& box, const Integrand& f, const QuadratureConfig& q);
/// Integral of f over box ∩ B through a nested chord map of [0,1]^n onto the
/// intersection (the ball boundary is a cell boundary, not a jump).
QuadResult integrate_box_ball_fn(const Box& box, const Ball& b, const Integrand& f, const QuadratureConfig& q);

/// Integral of w over B. Exact radial closed form when w is radial about the
/// center; self-similar decomposition for powers of the distance to a Cantor
/// limit set (see cantor_integral.hpp); adaptive cubature otherwise.
QuadResult integrate_ball(const Weight& w, const Ball& b, const QuadratureConfig& q);

/// h(B) = (1/r) * integral of w over B.
QuadResult h_value(const Weight& w, const Ball& b, const QuadratureConfig& q);

/// coef * |S^{n-1}| * r^{n+eta} / (n + eta)
double radial_ball_integral(int n, const RadialForm& form, double r);

}  // namespace divcap
