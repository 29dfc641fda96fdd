#include "drdmft/grid.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace drdmft {

std::vector<double> Axis::points() const {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = point(i);
  return xs;
}

UniformGrid::UniformGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  size_ = 1;
  for (const auto& ax : axes_) size_ *= static_cast<std::size_t>(ax.n);
}

double UniformGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.spacing;
  return v;
}

std::size_t UniformGrid::stride(int a) const {
  std::size_t s = 1;
  for (int b = dim() - 1; b > a; --b) s *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(b)].n);
  return s;
}

bool UniformGrid::same_as(const UniformGrid& other, double tol) const {
  if (dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const Axis& x = axis(a);
    const Axis& y = other.axis(a);
    if (x.n != y.n) return false;
    if (std::abs(x.spacing - y.spacing) > tol) return false;
    if (std::abs(x.length - y.length) > tol) return false;
  }
  return true;
}

UniformGrid make_grid(std::span<const AxisSpec> axes) {
  std::vector<Axis> built;
  built.reserve(axes.size());
  for (const AxisSpec& spec : axes) {
    if (!(spec.length > 0.0) || !(spec.spacing > 0.0) || !std::isfinite(spec.length) ||
        !std::isfinite(spec.spacing)) {
      throw NonCommensurate(
          fmt::format("axis requires positive finite L and h, got L={} h={}", spec.length, spec.spacing));
    }
    const double ratio = spec.length / spec.spacing;
    const long long k = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(k)) > 0.5) {
      throw NonCommensurate(fmt::format("L/h = {} is not within 0.5 of an integer", ratio));
    }
    const long long n = k + 1;
    if (n < 3) {
      throw TooSmall(fmt::format("axis with L={} h={} has only {} points (need >= 3)", spec.length,
                                 spec.spacing, n));
    }
    Axis ax;
    ax.spacing = spec.spacing;
    ax.n = static_cast<int>(n);
    // Points stay symmetric about 0: x_i = -(n-1)h/2 + i*h.
    ax.length = static_cast<double>(n - 1) * spec.spacing;
    built.push_back(ax);
  }
  return UniformGrid(std::move(built));
}

UniformGrid make_grid(std::initializer_list<AxisSpec> axes) {
  return make_grid(std::span<const AxisSpec>(axes.begin(), axes.size()));
}

Field::Field(const UniformGrid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw GridMismatch(fmt::format("field has {} values for a grid of {} points", values.size(), grid.size()));
  }
}

namespace {

// One axis of the 4th-order Laplacian. Lines along the axis have stride s;
// r enumerates the contiguous offsets inside one block so the inner loop is
// unit-stride.
void add_axis_stencil(const double* in, double* out, std::size_t n_outer, std::size_t n, std::size_t s,
                      double c0, double c1, double c2) {
  for (std::size_t o = 0; o < n_outer; ++o) {
    const double* fin = in + o * n * s;
    double* fout = out + o * n * s;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = fin + i * s;
      double* orow = fout + i * s;
      const bool m2 = i >= 2, m1 = i >= 1, p1 = i + 1 < n, p2 = i + 2 < n;
      for (std::size_t r = 0; r < s; ++r) {
        double acc = c0 * row[r];
        if (m1) acc += c1 * row[r - s];
        if (p1) acc += c1 * row[r + s];
        if (m2) acc += c2 * row[r - 2 * s];
        if (p2) acc += c2 * row[r + 2 * s];
        orow[r] += acc;
      }
    }
  }
}

} // namespace

void add_scaled_laplacian(const UniformGrid& grid, const double* in, double* out,
                          std::span<const int> axes, double scale) {
  std::vector<int> all;
  if (axes.empty()) {
    all.resize(static_cast<std::size_t>(grid.dim()));
    std::iota(all.begin(), all.end(), 0);
    axes = all;
  }
  for (int a : axes) {
    const Axis& ax = grid.axis(a);
    if (ax.n < 7) {
      throw TooSmall(fmt::format("axis {} has {} points; the 4th-order stencil needs >= 7", a, ax.n));
    }
    const double inv_h2 = scale / (ax.spacing * ax.spacing);
    const double c0 = -2.5 * inv_h2;
    const double c1 = (4.0 / 3.0) * inv_h2;
    const double c2 = (-1.0 / 12.0) * inv_h2;
    const std::size_t s = grid.stride(a);
    const std::size_t n = static_cast<std::size_t>(ax.n);
    const std::size_t n_outer = grid.size() / (n * s);
    add_axis_stencil(in, out, n_outer, n, s, c0, c1, c2);
  }
}

Field apply_laplacian(const Field& f, std::span<const int> axes) {
  Field out(f.grid);
  add_scaled_laplacian(f.grid, f.values.data(), out.values.data(), axes, 1.0);
  return out;
}

double integrate(const Field& f) { return f.grid.cell_volume() * f.values.sum(); }

double inner_product(const Field& f, const Field& g) {
  if (!f.grid.same_as(g.grid)) throw GridMismatch("inner_product: fields live on different grids");
  return f.grid.cell_volume() * f.values.dot(g.values);
}

double field_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

Field axis_marginal(const Field& f, int axis) {
  const UniformGrid& g = f.grid;
  const Axis& ax = g.axis(axis);
  UniformGrid out_grid(std::vector<Axis>{ax});
  Field out(out_grid);
  const double weight = g.cell_volume() / ax.spacing;
  const std::size_t s = g.stride(axis);
  const std::size_t n = static_cast<std::size_t>(ax.n);
  const std::size_t n_outer = g.size() / (n * s);
  const double* in = f.values.data();
  double* acc = out.values.data();
  for (std::size_t o = 0; o < n_outer; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = in + (o * n + i) * s;
      double sum = 0.0;
      for (std::size_t r = 0; r < s; ++r) sum += row[r];
      acc[i] += weight * sum;
    }
  }
  return out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= m - 1e-12 * m) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

} // namespace drdmft
