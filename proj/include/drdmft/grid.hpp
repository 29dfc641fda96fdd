#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "drdmft/errors.hpp"

namespace drdmft {

struct AxisSpec {
  double length;  // requested box length L (bohr)
  double spacing; // grid spacing h (bohr)
};

/// One axis of a tensor-product mesh. Points are x_i = -L/2 + i*h for
/// i = 0..n-1 with n = round(L/h) + 1, so the axis is symmetric about 0.
struct Axis {
  double length = 0.0;
  double spacing = 0.0;
  int n = 0;

  double point(int i) const { return -0.5 * length + i * spacing; }
  /// Span actually covered by the points, (n-1)*h.
  double effective_length() const { return (n - 1) * spacing; }
  std::vector<double> points() const;
};

class UniformGrid {
public:
  UniformGrid() = default;
  explicit UniformGrid(std::vector<Axis> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  std::size_t size() const { return size_; }
  /// Quadrature weight of one cell, prod_a h_a.
  double cell_volume() const;
  /// Flat-index stride of axis a (row-major, axis 0 slowest).
  std::size_t stride(int a) const;

  bool same_as(const UniformGrid& other, double tol = 1e-12) const;

private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

/// Builds a symmetric uniform grid. Throws NonCommensurate when L/h is not
/// within 0.5 of an integer (or L, h are not positive finite numbers) and
/// TooSmall when an axis would carry fewer than 3 points. Stencil application
/// imposes its own >= 7 point requirement per axis.
UniformGrid make_grid(std::span<const AxisSpec> axes);
UniformGrid make_grid(std::initializer_list<AxisSpec> axes);

/// Real-valued samples on a grid, one per point, row-major in axis order.
/// Everything outside the box is treated as exactly zero (hard-wall box).
struct Field {
  UniformGrid grid;
  Eigen::VectorXd values;

  Field() = default;
  explicit Field(const UniformGrid& g)
      : grid(g), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()))) {}
  Field(const UniformGrid& g, Eigen::VectorXd v);
};

/// out += scale * sum_{a in axes} d^2 in / d a^2 using the 4th-order central
/// stencil (-1/12, 4/3, -5/2, 4/3, -1/12)/h^2 with zero padding outside the
/// box. `in` and `out` must both hold grid.size() entries.
void add_scaled_laplacian(const UniformGrid& grid, const double* in, double* out,
                          std::span<const int> axes, double scale);

/// sum_{a in subset} d^2 f / d a^2. Empty subset means all axes.
Field apply_laplacian(const Field& f, std::span<const int> axes = {});

/// Riemann sum times the cell volume (consistent with the hard-wall
/// convention: points outside the box do not contribute).
double integrate(const Field& f);

/// integrate(f * g); fields must share the grid.
double inner_product(const Field& f, const Field& g);

/// L2 norm under the grid quadrature, sqrt(<f,f>).
double field_norm(const Field& f);

/// Marginal of f onto one axis: out(i) = sum over the other axes times their
/// spacings. The result lives on a 1D grid made of the chosen axis.
Field axis_marginal(const Field& f, int axis);

/// Deterministic sign convention: the first entry whose magnitude is within
/// 1e-12 of the maximum is made positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

} // namespace drdmft
