#pragma once

#include <optional>

#include "divcap/quadrature.hpp"
#include "divcap/weight.hpp"

namespace divcap {

/// w = coef * dist(x, E(lambda))^alpha, E the limit set in [0,1]^n.
struct CantorForm {
  int n = 1;
  double lambda = 0.25;
  double alpha = 0.0;
  double coef = 1.0;
};

/// The form of w when it is a constant times powers of the distance to one
/// Cantor limit set; empty otherwise.
std::optional<CantorForm> cantor_form(const Weight& w);

/// True when every point of a Cantor cube is at least as close to E inside
/// the cube as to E outside it: lambda <= 1 / (2 + sqrt(n) / 2). Then the
/// integral over any cube of generation j is lambda^{j (n + alpha)} times the
/// integral over [0,1]^n.
bool cantor_self_similar(int n, double lambda);

/// Integral of the form over B: cubes inside B by self-similarity, the gap
/// boxes cut by the sphere and the part outside [0,1]^n by box-ball cubature,
/// cubes below the resolution floor by their volume fraction.
QuadResult cantor_ball_integral(const CantorForm& f, const Ball& b, const QuadratureConfig& q);

}  // namespace divcap
