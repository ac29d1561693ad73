#include "divcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divcap/parallel.hpp"

namespace divcap {

GridField::GridField(Box box, int resolution) : GridField(std::move(box), [&] {
  std::array<int, kMaxDim> r{};
  r.fill(resolution);
  return r;
}()) {}

GridField::GridField(Box box, const std::array<int, kMaxDim>& resolution) : box_(std::move(box)) {
  const int n = box_.dim();
  require_dim(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (resolution[i] < 2) throw DomainError("grid resolution must be >= 2 cells per axis");
    if (!(box_.extent(i) > 0.0)) throw DomainError("grid box must have positive extent");
    res_[i] = resolution[i];
    stride_[i] = total;
    total *= static_cast<std::size_t>(res_[i] + 1);
  }
  values_.assign(total, 0.0);
}

std::size_t GridField::cell_count() const {
  std::size_t c = 1;
  for (int i = 0; i < dim(); ++i) c *= static_cast<std::size_t>(res_[i]);
  return c;
}

double GridField::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= spacing(i);
  return v;
}

std::array<int, kMaxDim> GridField::coords(std::size_t idx) const {
  std::array<int, kMaxDim> c{};
  for (int i = 0; i < dim(); ++i) {
    c[i] = static_cast<int>(idx % static_cast<std::size_t>(res_[i] + 1));
    idx /= static_cast<std::size_t>(res_[i] + 1);
  }
  return c;
}

std::size_t GridField::index(const std::array<int, kMaxDim>& c) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx += static_cast<std::size_t>(c[i]) * stride_[i];
  return idx;
}

Point GridField::node(std::size_t idx) const {
  const auto c = coords(idx);
  Point x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = box_.lo[i] + c[i] * spacing(i);
  return x;
}

bool GridField::on_boundary(std::size_t idx) const {
  const auto c = coords(idx);
  for (int i = 0; i < dim(); ++i) {
    if (c[i] == 0 || c[i] == res_[i]) return true;
  }
  return false;
}

std::size_t GridField::cell_anchor(std::size_t cell) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    idx += (cell % static_cast<std::size_t>(res_[i])) * stride_[i];
    cell /= static_cast<std::size_t>(res_[i]);
  }
  return idx;
}

Point GridField::cell_center(std::size_t cell) const {
  Point x = node(cell_anchor(cell));
  for (int i = 0; i < dim(); ++i) x[i] += 0.5 * spacing(i);
  return x;
}

double GridField::interpolate(const Point& x) const {
  require_same_dim(dim(), x.dim(), "grid interpolation");
  const int n = dim();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < n; ++i) {
    double t = (x[i] - box_.lo[i]) / spacing(i);
    t = std::clamp(t, 0.0, static_cast<double>(res_[i]));
    int b = std::min(static_cast<int>(std::floor(t)), res_[i] - 1);
    base[i] = b;
    frac[i] = t - b;
  }
  double v = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double wgt = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      const int bit = (corner >> i) & 1;
      wgt *= bit ? frac[i] : 1.0 - frac[i];
      idx += static_cast<std::size_t>(base[i] + bit) * stride_[i];
    }
    if (wgt != 0.0) v += wgt * values_[idx];
  }
  return v;
}

NodeMask mask_where(const GridField& grid, const std::function<bool(const Point&)>& pred) {
  NodeMask m(grid.node_count(), 0);
  const auto count = static_cast<long long>(grid.node_count());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    m[static_cast<std::size_t>(i)] = pred(grid.node(static_cast<std::size_t>(i))) ? 1 : 0;
  }
  return m;
}

std::string to_string(CapacityVariant v) { return v == CapacityVariant::sobolev ? "sobolev" : "dirichlet"; }

std::vector<double> cell_weights(const Weight& w, const GridField& grid, double weight_cap, std::size_t* capped) {
  require_same_dim(w.dim(), grid.dim(), "cell_weights");
  auto vals = parallel_map<double>(grid.cell_count(), [&](std::size_t c) {
    return w.eval_unchecked(grid.cell_center(c));
  });
  std::vector<double> finite;
  finite.reserve(vals.size());
  for (double v : vals) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  double cap = std::numeric_limits<double>::max();
  if (!finite.empty()) {
    auto mid = finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2);
    std::nth_element(finite.begin(), mid, finite.end());
    cap = weight_cap * *mid;
  }
  std::size_t n_capped = 0;
  for (double& v : vals) {
    if (!(v <= cap)) {
      v = cap;
      ++n_capped;
    }
  }
  if (capped) *capped = n_capped;
  return vals;
}

EnergyKernel::EnergyKernel(const GridField& grid, std::vector<double> cell_w, double p, CapacityVariant v)
    : grid_(grid.box(), [&] {
        std::array<int, kMaxDim> r{};
        for (int i = 0; i < grid.dim(); ++i) r[i] = grid.resolution(i);
        return r;
      }()),
      w_(std::move(cell_w)),
      p_(p),
      variant_(v),
      corners_(1 << grid.dim()) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("capacity exponent p must be > 1");
  if (w_.size() != grid_.cell_count()) throw DomainError("cell weight count does not match the grid");
  for (int b = 0; b < corners_; ++b) {
    std::size_t off = 0;
    for (int i = 0; i < grid.dim(); ++i) {
      if ((b >> i) & 1) off += grid.stride(i);
    }
    corner_offset_[static_cast<std::size_t>(b)] = off;
  }
  for (int i = 0; i < grid.dim(); ++i) inv_h2_[i] = 1.0 / (grid.spacing(i) * grid.spacing(i));
}

double EnergyKernel::cell_energy(const std::vector<double>& phi, std::size_t cell) const {
  const int n = grid_.dim();
  const std::size_t a = grid_.cell_anchor(cell);
  std::array<double, 16> v{};
  for (int b = 0; b < corners_; ++b) v[b] = phi[a + corner_offset_[b]];
  const double edge_w = 2.0 / corners_;  // 1 / 2^{n-1}
  double g2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int b = 0; b < corners_; ++b) {
      if ((b >> i) & 1) continue;
      const double d = v[b | (1 << i)] - v[b];
      s += d * d;
    }
    g2 += inv_h2_[i] * edge_w * s;
  }
  double e = p_ == 2.0 ? g2 : std::pow(g2, 0.5 * p_);
  if (variant_ == CapacityVariant::sobolev) {
    double m = 0.0;
    for (int b = 0; b < corners_; ++b) m += p_ == 2.0 ? v[b] * v[b] : std::pow(std::abs(v[b]), p_);
    e += m / corners_;
  }
  return w_[cell] * grid_.cell_volume() * e;
}

double EnergyKernel::energy(const std::vector<double>& phi) const {
  return blocked_sum(grid_.cell_count(), [&](std::size_t c) { return cell_energy(phi, c); });
}

double EnergyKernel::energy_serial(const std::vector<double>& phi) const {
  CompensatedSum s;
  double block = 0.0;
  const std::size_t cells = grid_.cell_count();
  for (std::size_t c = 0; c < cells; ++c) {
    block += cell_energy(phi, c);
    if ((c + 1) % kReductionBlock == 0 || c + 1 == cells) {
      s.add(block);
      block = 0.0;
    }
  }
  return s.value();
}

void EnergyKernel::gradient(const std::vector<double>& phi, std::vector<double>& out) const {
  const int n = grid_.dim();
  const std::size_t cells = grid_.cell_count();
  const double vol = grid_.cell_volume();
  const double edge_w = 2.0 / corners_;
  // Per-cell factor d(g^p)/d(g^2) * w * vol.
  std::vector<double> fac(cells);
  const auto nc = static_cast<long long>(cells);
#pragma omp parallel for schedule(static)
  for (long long cl = 0; cl < nc; ++cl) {
    const auto c = static_cast<std::size_t>(cl);
    double f = w_[c] * vol;
    if (p_ != 2.0) {
      const std::size_t a = grid_.cell_anchor(c);
      double g2 = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int b = 0; b < corners_; ++b) {
          if ((b >> i) & 1) continue;
          const double d = phi[a + corner_offset_[b | (1 << i)]] - phi[a + corner_offset_[b]];
          g2 += inv_h2_[i] * edge_w * d * d;
        }
      }
      f *= g2 > 0.0 ? 0.5 * p_ * std::pow(g2, 0.5 * p_ - 1.0) : 0.0;
    }
    fac[c] = f;
  }
  out.assign(phi.size(), 0.0);
  const auto nn = static_cast<long long>(phi.size());
#pragma omp parallel for schedule(static)
  for (long long il = 0; il < nn; ++il) {
    const auto idx = static_cast<std::size_t>(il);
    const auto c = grid_.coords(idx);
    const double x = phi[idx];
    double g = 0.0;
    for (int b = 0; b < corners_; ++b) {
      // Cell whose corner b is this node.
      std::size_t cell = 0, mult = 1;
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        const int ci = c[i] - ((b >> i) & 1);
        if (ci < 0 || ci >= grid_.resolution(i)) {
          ok = false;
          break;
        }
        cell += static_cast<std::size_t>(ci) * mult;
        mult *= static_cast<std::size_t>(grid_.resolution(i));
      }
      if (!ok) continue;
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::size_t partner = ((b >> i) & 1) ? idx - grid_.stride(i) : idx + grid_.stride(i);
        s += inv_h2_[i] * edge_w * 2.0 * (x - phi[partner]);
      }
      g += fac[cell] * s;
      if (variant_ == CapacityVariant::sobolev) {
        const double dm = p_ == 2.0 ? 2.0 * x : p_ * std::pow(std::abs(x), p_ - 1.0) * (x < 0.0 ? -1.0 : 1.0);
        g += w_[cell] * vol * dm / corners_;
      }
    }
    out[idx] = g;
  }
}

void EnergyKernel::gradient_serial(const std::vector<double>& phi, std::vector<double>& out) const {
  const int n = grid_.dim();
  const double vol = grid_.cell_volume();
  const double edge_w = 2.0 / corners_;
  out.assign(phi.size(), 0.0);
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    const std::size_t a = grid_.cell_anchor(c);
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < corners_; ++b) {
        if ((b >> i) & 1) continue;
        const double d = phi[a + corner_offset_[b | (1 << i)]] - phi[a + corner_offset_[b]];
        g2 += inv_h2_[i] * edge_w * d * d;
      }
    }
    double f = w_[c] * vol;
    if (p_ != 2.0) f *= g2 > 0.0 ? 0.5 * p_ * std::pow(g2, 0.5 * p_ - 1.0) : 0.0;
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < corners_; ++b) {
        if ((b >> i) & 1) continue;
        const std::size_t lo = a + corner_offset_[b], hi = a + corner_offset_[b | (1 << i)];
        const double d = f * inv_h2_[i] * edge_w * 2.0 * (phi[hi] - phi[lo]);
        out[hi] += d;
        out[lo] -= d;
      }
    }
    if (variant_ == CapacityVariant::sobolev) {
      for (int b = 0; b < corners_; ++b) {
        const double x = phi[a + corner_offset_[b]];
        const double dm = p_ == 2.0 ? 2.0 * x : p_ * std::pow(std::abs(x), p_ - 1.0) * (x < 0.0 ? -1.0 : 1.0);
        out[a + corner_offset_[b]] += w_[c] * vol * dm / corners_;
      }
    }
  }
}

std::vector<double> EnergyKernel::diagonal() const {
  const int n = grid_.dim();
  const double vol = grid_.cell_volume();
  const double edge_w = 2.0 / corners_;
  double per_cell = 0.0;
  for (int i = 0; i < n; ++i) per_cell += inv_h2_[i] * edge_w * 2.0;
  if (variant_ == CapacityVariant::sobolev) per_cell += 2.0 / corners_;
  std::vector<double> d(grid_.node_count(), 0.0);
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    const std::size_t a = grid_.cell_anchor(c);
    for (int b = 0; b < corners_; ++b) d[a + corner_offset_[b]] += w_[c] * vol * per_cell;
  }
  return d;
}

GridField clamp(const GridField& field) {
  GridField out = field;
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

CapacityEstimate solve_capacity(const Weight& wp, const NodeMask& E_mask, double p, CapacityVariant variant,
                                const GridField& grid, const SolverConfig& cfg, const NodeMask& zero_mask,
                                const GridField* initial) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("capacity exponent p must be > 1");
  require_same_dim(wp.dim(), grid.dim(), "solve_capacity");
  const std::size_t nodes = grid.node_count();
  if (E_mask.size() != nodes) throw DomainError("E mask size does not match the grid");
  if (!zero_mask.empty() && zero_mask.size() != nodes) throw DomainError("zero mask size does not match the grid");
  if (cfg.window < 1 || cfg.max_iterations < 1) throw DomainError("solver window and iteration cap must be positive");

  CapacityEstimate est;
  est.variant = variant;
  est.p = p;
  est.resolution = grid.resolution(0);
  est.field = GridField(grid.box(), [&] {
    std::array<int, kMaxDim> r{};
    for (int i = 0; i < grid.dim(); ++i) r[i] = grid.resolution(i);
    return r;
  }());

  // Pins and the padding precondition.
  const int n = grid.dim();
  std::vector<std::uint8_t> pinned(nodes, 0);
  std::array<double, kMaxDim> elo{}, ehi{};
  elo.fill(std::numeric_limits<double>::infinity());
  ehi.fill(-std::numeric_limits<double>::infinity());
  bool any = false;
  for (std::size_t i = 0; i < nodes; ++i) {
    const bool zero = grid.on_boundary(i) || (!zero_mask.empty() && zero_mask[i]);
    if (E_mask[i]) {
      if (zero) throw DomainError("E mask touches the zero boundary");
      pinned[i] = 1;
      any = true;
      const Point x = grid.node(i);
      for (int d = 0; d < n; ++d) {
        elo[d] = std::min(elo[d], x[d]);
        ehi[d] = std::max(ehi[d], x[d]);
      }
    } else if (zero) {
      pinned[i] = 1;
    }
  }
  if (!any) {
    est.converged = true;
    return est;
  }
  for (int d = 0; d < n; ++d) {
    const double pad = 0.25 * grid.box().extent(d) - 1e-9 * grid.box().extent(d);
    if (elo[d] - grid.box().lo[d] < pad || grid.box().hi[d] - ehi[d] < pad) {
      throw DomainError("E mask needs at least 25% padding on every side of the box");
    }
  }

  EnergyKernel kernel(grid, cell_weights(wp, grid, cfg.weight_cap, &est.capped_cells), p, variant);
  auto diag = kernel.diagonal();
  for (double& d : diag) d = d > 0.0 ? d : 1.0;

  std::vector<double>& x = est.field.values();
  for (std::size_t i = 0; i < nodes; ++i) {
    if (E_mask[i]) {
      x[i] = 1.0;
    } else if (pinned[i]) {
      x[i] = 0.0;
    } else {
      x[i] = initial ? std::clamp(initial->interpolate(grid.node(i)), 0.0, 1.0) : 0.0;
    }
  }

  const auto dot_free = [&](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>* m) {
    return blocked_sum(nodes, [&](std::size_t i) {
      if (pinned[i]) return 0.0;
      return a[i] * b[i] * (m ? (*m)[i] : 1.0);
    });
  };

  std::vector<double> g, gn, xn(nodes), y(nodes), s(nodes), yv(nodes);
  kernel.gradient(x, g);
  for (std::size_t i = 0; i < nodes; ++i) {
    if (pinned[i]) g[i] = 0.0;
  }
  double energy = kernel.energy(x);
  std::vector<double> history{energy};
  double alpha = 1.0;
  const auto nn = static_cast<long long>(nodes);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    bool accepted = false;
    double e_new = energy;
    for (int back = 0; back < 60; ++back) {
#pragma omp parallel for schedule(static)
      for (long long il = 0; il < nn; ++il) {
        const auto i = static_cast<std::size_t>(il);
        y[i] = pinned[i] ? x[i] : x[i] - alpha * g[i] / diag[i];
        xn[i] = pinned[i] ? x[i] : std::clamp(y[i], 0.0, 1.0);
      }
      if (cfg.check_clamp) {
        const double ey = kernel.energy(y);
        const double ec = kernel.energy(xn);
        ++est.clamp_checks;
        if (ec > ey) ++est.clamp_violations;
        e_new = ec;
      } else {
        e_new = kernel.energy(xn);
      }
      const double decrease = blocked_sum(nodes, [&](std::size_t i) { return g[i] * (x[i] - xn[i]); });
      if (e_new <= energy - 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No descent left at machine precision.
      est.converged = true;
      est.iterations = it;
      break;
    }
    kernel.gradient(xn, gn);
#pragma omp parallel for schedule(static)
    for (long long il = 0; il < nn; ++il) {
      const auto i = static_cast<std::size_t>(il);
      if (pinned[i]) gn[i] = 0.0;
      s[i] = xn[i] - x[i];
      yv[i] = gn[i] - g[i];
    }
    const double sDs = dot_free(s, s, &diag);
    const double sy = dot_free(s, yv, nullptr);
    alpha = sy > 0.0 ? sDs / sy : 2.0 * alpha;
    alpha = std::clamp(alpha, 1e-12, 1e12);
    x.swap(xn);
    g.swap(gn);
    if (e_new > energy) est.energy_monotone = false;
    energy = e_new;
    history.push_back(energy);
    est.iterations = it;
    if (energy == 0.0) {
      est.converged = true;
      break;
    }
    if (static_cast<int>(history.size()) > cfg.window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(cfg.window)];
      if (old - energy <= cfg.rel_decrease * std::abs(energy)) {
        est.converged = true;
        break;
      }
    }
  }
  est.value = energy;
  const std::size_t tail = std::min<std::size_t>(history.size(), 50);
  est.energy_tail.assign(history.end() - static_cast<std::ptrdiff_t>(tail), history.end());
  return est;
}

double radial_oracle(int n, double p, double r, double R) {
  require_dim(n);
  if (!(p > 1.0)) throw DomainError("radial oracle needs p > 1");
  if (!(r > 0.0 && R > r)) throw DomainError("radial oracle needs 0 < r < R");
  const double e = (1.0 - n) / (p - 1.0);
  const double integral = e == -1.0 ? std::log(R / r) : (std::pow(R, e + 1.0) - std::pow(r, e + 1.0)) / (e + 1.0);
  return unit_sphere_area(n) * std::pow(integral, 1.0 - p);
}

std::string to_string(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::null: return "null";
    case ZeroVerdict::positive: return "positive";
    default: return "undecided";
  }
}

ZeroVerdict capacity_zero_verdict(const std::vector<double>& v, const ZeroVerdictOptions& opt) {
  if (v.size() < 3) return ZeroVerdict::undecided;
  if (v.back() == 0.0) return ZeroVerdict::null;
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) return ZeroVerdict::undecided;
  }
  bool ratio_rule = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] < opt.null_ratio * v[i + 1]) ratio_rule = false;
  }
  bool log_rule = true;
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) inc.push_back(1.0 / v[i + 1] - 1.0 / v[i]);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (!(inc[i] > 0.0)) log_rule = false;
    if (i > 0 && inc[i] < opt.log_ratio * inc[i - 1]) log_rule = false;
  }
  const double last_change = (v[v.size() - 2] - v.back()) / v[v.size() - 2];
  if (last_change < opt.log_min_change) log_rule = false;
  if (ratio_rule || log_rule) return ZeroVerdict::null;
  if (std::abs(last_change) <= opt.stable_tol) return ZeroVerdict::positive;
  return ZeroVerdict::undecided;
}

}  // namespace divcap
