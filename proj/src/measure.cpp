#include "divcap/measure.hpp"

#include <algorithm>
#include <limits>

#include "divcap/parallel.hpp"

namespace divcap {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  CompensatedSum s;
  for (const auto& a : atoms_) {
    if (!(a.m >= 0.0) || !std::isfinite(a.m)) throw DomainError("atom masses must be finite and >= 0");
    if (a.x.dim() != atoms_.front().x.dim()) throw DomainError("atoms must share one dimension");
    s.add(a.m);
  }
  total_ = s.value();
}

DiscreteMeasure DiscreteMeasure::scaled(double t) const {
  if (!(t >= 0.0)) throw DomainError("measure scale must be >= 0");
  auto atoms = atoms_;
  for (auto& a : atoms) a.m *= t;
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure DiscreteMeasure::operator+(const DiscreteMeasure& other) const {
  auto atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return DiscreteMeasure(std::move(atoms));
}

double DiscreteMeasure::min_spacing() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      best = std::min(best, distance(atoms_[i].x, atoms_[j].x));
    }
  }
  return best;
}

double DiscreteMeasure::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      best = std::max(best, distance(atoms_[i].x, atoms_[j].x));
    }
  }
  return best;
}

DiscreteMeasure segment_measure(const Point& a, const Point& b, int n_atoms) {
  require_same_dim(a.dim(), b.dim(), "segment_measure");
  if (n_atoms < 1) throw DomainError("segment_measure needs at least one atom");
  const double length = distance(a, b);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n_atoms));
  for (int i = 0; i < n_atoms; ++i) {
    const double t = (i + 0.5) / n_atoms;
    atoms.push_back({a + t * (b - a), length / n_atoms});
  }
  return DiscreteMeasure(std::move(atoms));
}

double measure_of_ball(const DiscreteMeasure& mu, const Ball& ball) {
  CompensatedSum s;
  for (const auto& a : mu.atoms()) {
    if (ball.contains(a.x)) s.add(a.m);
  }
  return s.value();
}

}  // namespace divcap
