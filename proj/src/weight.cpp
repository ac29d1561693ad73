#include "divcap/weight.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace divcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power_of_distance(double d, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (d == 0.0) return exponent < 0.0 ? kInf : 0.0;
  return std::pow(d, exponent);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double CantorReference::similarity_dimension() const {
  return n * std::log(2.0) / std::log(1.0 / lambda);
}

Weight::Weight(int n, Kind kind) : n_(n), kind_(std::move(kind)) { require_dim(n); }

Weight Weight::constant(int n, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant weight needs c > 0");
  return Weight(n, ConstantWeight{c});
}

Weight Weight::radial_power(double eta, const Point& center) {
  const int n = center.dim();
  if (!std::isfinite(eta)) throw DomainError("radial exponent must be finite");
  if (!(eta > -n)) throw DomainError("radial power weight needs eta > -n for local integrability");
  return Weight(n, RadialPowerWeight{eta, center});
}

Weight Weight::dist_power(const CantorReference& set, double alpha) {
  // Validates n and lambda.
  CantorSpec(set.n, set.lambda, set.generation.value_or(0));
  if (!std::isfinite(alpha)) throw DomainError("distance exponent must be finite");
  if (!(alpha > set.similarity_dimension() - set.n)) {
    throw DomainError("distance power weight needs alpha > s - n for local integrability");
  }
  return Weight(set.n, DistPowerWeight{set, alpha});
}

Weight Weight::cantor_distance(int n, double s, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in [0, 1)");
  const auto spec = CantorSpec::from_dimension(n, s, 0);
  return dist_power(CantorReference{n, spec.lambda(), std::nullopt}, gamma * (s - n));
}

Weight Weight::product(std::vector<Weight> factors) {
  if (factors.empty()) throw DomainError("product weight needs at least one factor");
  const int n = factors.front().dim();
  for (const auto& f : factors) require_same_dim(n, f.dim(), "product weight");
  return Weight(n, ProductWeight{std::move(factors)});
}

double Weight::operator()(const Point& x) const {
  require_same_dim(n_, x.dim(), "eval_weight");
  return eval_unchecked(x);
}

double Weight::eval_unchecked(const Point& x) const {
  return std::visit(
      Overloaded{
          [](const ConstantWeight& w) { return w.c; },
          [&](const RadialPowerWeight& w) { return power_of_distance(distance(x, w.center), w.eta); },
          [&](const DistPowerWeight& w) {
            if (w.alpha == 0.0) return 1.0;
            const double d = w.set.generation
                                 ? dist_to_set(CantorSpec(w.set.n, w.set.lambda, *w.set.generation), x)
                                 : dist_to_limit_set(w.set.n, w.set.lambda, x);
            return power_of_distance(d, w.alpha);
          },
          [&](const ProductWeight& w) {
            double v = 1.0;
            bool infinite = false;
            for (const auto& f : w.factors) {
              const double fv = f.eval_unchecked(x);
              if (std::isinf(fv)) {
                infinite = true;
              } else {
                v *= fv;
              }
            }
            return infinite ? kInf : v;
          },
      },
      kind_);
}

Weight Weight::pow(double t) const {
  if (!std::isfinite(t)) throw DomainError("weight power must be finite");
  return std::visit(
      Overloaded{
          [&](const ConstantWeight& w) { return Weight::constant(n_, std::pow(w.c, t)); },
          [&](const RadialPowerWeight& w) { return Weight::radial_power(w.eta * t, w.center); },
          [&](const DistPowerWeight& w) { return Weight::dist_power(w.set, w.alpha * t); },
          [&](const ProductWeight& w) {
            std::vector<Weight> fs;
            fs.reserve(w.factors.size());
            for (const auto& f : w.factors) fs.push_back(f.pow(t));
            return Weight::product(std::move(fs));
          },
      },
      kind_);
}

std::optional<RadialForm> Weight::radial_form_about(const Point& c) const {
  return std::visit(
      Overloaded{
          [](const ConstantWeight& w) -> std::optional<RadialForm> { return RadialForm{w.c, 0.0}; },
          [&](const RadialPowerWeight& w) -> std::optional<RadialForm> {
            if (w.center == c) return RadialForm{1.0, w.eta};
            return std::nullopt;
          },
          [](const DistPowerWeight& w) -> std::optional<RadialForm> {
            if (w.alpha == 0.0) return RadialForm{1.0, 0.0};
            return std::nullopt;
          },
          [&](const ProductWeight& w) -> std::optional<RadialForm> {
            RadialForm acc;
            for (const auto& f : w.factors) {
              const auto r = f.radial_form_about(c);
              if (!r) return std::nullopt;
              acc.coef *= r->coef;
              acc.eta += r->eta;
            }
            return acc;
          },
      },
      kind_);
}

std::optional<std::string> Weight::integrability_problem() const {
  return std::visit(
      Overloaded{
          [](const ConstantWeight&) -> std::optional<std::string> { return std::nullopt; },
          [&](const RadialPowerWeight& w) -> std::optional<std::string> {
            if (w.eta <= -n_) return "radial exponent eta <= -n";
            return std::nullopt;
          },
          [&](const DistPowerWeight& w) -> std::optional<std::string> {
            if (w.alpha < 0.0 && w.set.generation) {
              return "negative power of the distance to E_k is infinite on cubes of positive volume";
            }
            if (w.alpha <= w.set.similarity_dimension() - n_) return "distance exponent alpha <= s - n";
            return std::nullopt;
          },
          [&](const ProductWeight& w) -> std::optional<std::string> {
            // Singular sets of distinct factors may coincide; the sum of the
            // exponents of coinciding singularities must stay integrable.
            double radial_eta = 0.0;
            bool radial = false;
            for (const auto& f : w.factors) {
              if (auto p = f.integrability_problem()) return p;
              if (const auto* r = std::get_if<RadialPowerWeight>(&f.kind())) {
                radial_eta += r->eta;
                radial = true;
              }
            }
            if (radial && radial_eta <= -n_) return "combined radial exponent <= -n";
            return std::nullopt;
          },
      },
      kind_);
}

bool Weight::congruent_on_cantor_cubes(const CantorSpec& spec) const {
  return std::visit(
      Overloaded{
          [](const ConstantWeight&) { return true; },
          [](const RadialPowerWeight& w) { return w.eta == 0.0; },
          [&](const DistPowerWeight& w) {
            return w.alpha == 0.0 ||
                   (!w.set.generation && w.set.n == spec.dim() && w.set.lambda == spec.lambda());
          },
          [&](const ProductWeight& w) {
            for (const auto& f : w.factors) {
              if (!f.congruent_on_cantor_cubes(spec)) return false;
            }
            return true;
          },
      },
      kind_);
}

std::string Weight::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ConstantWeight& w) { os << "constant(" << w.c << ")"; },
                 [&](const RadialPowerWeight& w) { os << "|x - x0|^" << w.eta; },
                 [&](const DistPowerWeight& w) {
                   os << "dist(x, E(lambda=" << w.set.lambda << "))^" << w.alpha;
                 },
                 [&](const ProductWeight& w) {
                   for (std::size_t i = 0; i < w.factors.size(); ++i) {
                     if (i) os << " * ";
                     os << w.factors[i].describe();
                   }
                 },
             },
             kind_);
  return os.str();
}

}  // namespace divcap
