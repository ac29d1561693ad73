#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "divcap/geometry.hpp"
#include "divcap/weight.hpp"

namespace divcap {

/// Scalar field on the nodes of a uniform grid over a box. Node (i_0, ...,
/// i_{n-1}) has linear index sum_d i_d * stride_d with axis 0 fastest.
class GridField {
 public:
  GridField() = default;
  GridField(Box box, int resolution);
  GridField(Box box, const std::array<int, kMaxDim>& resolution);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  /// Cells along an axis (nodes = cells + 1).
  int resolution(int axis) const { return res_[axis]; }
  int nodes(int axis) const { return res_[axis] + 1; }
  std::size_t node_count() const { return values_.size(); }
  std::size_t cell_count() const;
  std::size_t stride(int axis) const { return stride_[axis]; }
  double spacing(int axis) const { return box_.extent(axis) / res_[axis]; }
  double cell_volume() const;

  std::array<int, kMaxDim> coords(std::size_t idx) const;
  std::size_t index(const std::array<int, kMaxDim>& c) const;
  Point node(std::size_t idx) const;
  bool on_boundary(std::size_t idx) const;
  /// Lowest-corner node of each cell, in cell order (axis 0 fastest).
  std::size_t cell_anchor(std::size_t cell) const;
  Point cell_center(std::size_t cell) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Multilinear interpolation (clamped to the box).
  double interpolate(const Point& x) const;

 private:
  Box box_;
  std::array<int, kMaxDim> res_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::vector<double> values_;
};

using NodeMask = std::vector<std::uint8_t>;

/// Nodes x with pred(x).
NodeMask mask_where(const GridField& grid, const std::function<bool(const Point&)>& pred);

enum class CapacityVariant { sobolev, dirichlet };
std::string to_string(CapacityVariant v);

struct SolverConfig {
  int max_iterations = 20000;
  double rel_decrease = 1e-6;  ///< convergence: relative energy decrease over `window` iterations
  int window = 50;
  bool check_clamp = false;  ///< verify energy(clamp(y)) <= energy(y) on every iterate
  double weight_cap = 1e6;   ///< cell weights above weight_cap * median are capped
};

struct CapacityEstimate {
  double value = 0.0;
  CapacityVariant variant = CapacityVariant::dirichlet;
  double p = 2.0;
  int resolution = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> energy_tail;
  std::size_t capped_cells = 0;
  std::size_t clamp_checks = 0;
  std::size_t clamp_violations = 0;
  bool energy_monotone = true;
  GridField field;
};

/// Weight values at cell centers, capped at weight_cap * median. Returns the
/// number of capped cells through `capped`.
std::vector<double> cell_weights(const Weight& w, const GridField& grid, double weight_cap,
                                 std::size_t* capped = nullptr);

/// Discrete energy sum_cells w_c vol ([sobolev] mean_corners |phi|^p + g_c^p),
/// g_c^2 = sum_i mean over the cell's axis-i edges of (delta phi / h_i)^2.
class EnergyKernel {
 public:
  EnergyKernel(const GridField& grid, std::vector<double> cell_w, double p, CapacityVariant v);

  double energy(const std::vector<double>& phi) const;
  double energy_serial(const std::vector<double>& phi) const;
  /// Gradient by a per-node gather over adjacent cells.
  void gradient(const std::vector<double>& phi, std::vector<double>& out) const;
  /// Reference gradient by a serial scatter over cells.
  void gradient_serial(const std::vector<double>& phi, std::vector<double>& out) const;
  /// Diagonal of the p = 2 Hessian, for preconditioning.
  std::vector<double> diagonal() const;

  const GridField& grid() const { return grid_; }

 private:
  double cell_energy(const std::vector<double>& phi, std::size_t cell) const;
  GridField grid_;
  std::vector<double> w_;
  double p_;
  CapacityVariant variant_;
  int corners_;
  std::array<std::size_t, 16> corner_offset_{};
  std::array<double, kMaxDim> inv_h2_{};
};

/// Nodewise clamp to [0, 1].
GridField clamp(const GridField& field);

/// Minimizes the discrete energy over fields with phi = 1 on E_mask, phi = 0
/// on the box boundary and on zero_mask (if nonempty), by projected
/// Barzilai-Borwein gradient descent with Armijo backtracking. `initial`,
/// if given, is interpolated as the starting field.
CapacityEstimate solve_capacity(const Weight& wp, const NodeMask& E_mask, double p, CapacityVariant variant,
                                const GridField& grid, const SolverConfig& cfg = {},
                                const NodeMask& zero_mask = {}, const GridField* initial = nullptr);

/// |S^{n-1}| (int_r^R rho^{(1-n)/(p-1)} d rho)^{1-p}
double radial_oracle(int n, double p, double r, double R);

enum class ZeroVerdict { null, positive, undecided };
std::string to_string(ZeroVerdict v);

struct ZeroVerdictOptions {
  double null_ratio = 1.5;       ///< per-refinement decrease factor
  double stable_tol = 0.10;      ///< relative change across the last two levels
  double log_ratio = 0.75;       ///< increments of 1/cap must not shrink below this ratio
  double log_min_change = 0.05;  ///< last relative decrease needed by the 1/cap rule
};

/// null: values decrease by >= null_ratio per refinement, or the increments
/// of 1/value stay positive without decaying (logarithmic decay); positive:
/// the last change is within stable_tol and no null evidence; else undecided.
ZeroVerdict capacity_zero_verdict(const std::vector<double>& values, const ZeroVerdictOptions& opt = {});

void write_field_binary(std::ostream& os, const GridField& f);
GridField read_field_binary(std::istream& is);
void write_field_csv(std::ostream& os, const GridField& f);

}  // namespace divcap
