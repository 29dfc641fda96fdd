#include "drdmft/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>

namespace drdmft {

PotentialSpec PotentialSpec::soft_helium(double softening) {
  PotentialSpec s;
  s.kind = Kind::SoftHelium;
  s.softening = softening;
  return s;
}

PotentialSpec PotentialSpec::soft_hydrogen_molecule(double d, double softening) {
  PotentialSpec s;
  s.kind = Kind::SoftHydrogenMolecule;
  s.d = d;
  s.softening = softening;
  return s;
}

PotentialSpec PotentialSpec::soft_beryllium(double softening) {
  PotentialSpec s;
  s.kind = Kind::SoftBeryllium;
  s.softening = softening;
  return s;
}

PotentialSpec PotentialSpec::harmonic(double k) {
  PotentialSpec s;
  s.kind = Kind::Harmonic;
  s.k = k;
  return s;
}

PotentialSpec PotentialSpec::custom(std::vector<double> xs, std::vector<double> vs) {
  PotentialSpec s;
  s.kind = Kind::Custom;
  s.xs = std::move(xs);
  s.vs = std::move(vs);
  return s;
}

Coupling effective_coupling(const PhotonMode& mode) {
  Coupling c;
  c.g = std::abs(mode.lambda) * std::sqrt(mode.omega / 2.0);
  c.g_over_omega = c.g / mode.omega;
  return c;
}

double lambda_for(double g_over_omega, double omega) { return g_over_omega * std::sqrt(2.0 * omega); }

double bare_potential(double x, const PotentialSpec& spec) {
  const double e2 = spec.softening * spec.softening;
  switch (spec.kind) {
  case PotentialSpec::Kind::SoftHelium:
    return -2.0 / std::sqrt(x * x + e2);
  case PotentialSpec::Kind::SoftHydrogenMolecule: {
    const double a = x - spec.d;
    const double b = x + spec.d;
    return -1.0 / std::sqrt(a * a + e2) - 1.0 / std::sqrt(b * b + e2);
  }
  case PotentialSpec::Kind::SoftBeryllium:
    return -4.0 / std::sqrt(x * x + e2);
  case PotentialSpec::Kind::Harmonic:
    return 0.5 * spec.k * x * x;
  case PotentialSpec::Kind::Custom: {
    if (spec.xs.size() < 2 || spec.xs.size() != spec.vs.size()) {
      throw UnknownKind("custom potential needs matching xs/vs tables with >= 2 samples");
    }
    if (x <= spec.xs.front()) return spec.vs.front();
    if (x >= spec.xs.back()) return spec.vs.back();
    const auto it = std::upper_bound(spec.xs.begin(), spec.xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - spec.xs.begin());
    const double t = (x - spec.xs[j - 1]) / (spec.xs[j] - spec.xs[j - 1]);
    return (1.0 - t) * spec.vs[j - 1] + t * spec.vs[j];
  }
  }
  throw UnknownKind("unhandled potential kind");
}

double soft_coulomb(double x, double xp, double softening) {
  const double u = x - xp;
  return 1.0 / std::sqrt(u * u + softening * softening);
}

double nuclear_repulsion(const PotentialSpec& spec) {
  if (spec.kind != PotentialSpec::Kind::SoftHydrogenMolecule) return 0.0;
  const double sep = 2.0 * spec.d;
  return 1.0 / std::sqrt(sep * sep + spec.softening * spec.softening);
}

double dressed_potential(double x, std::span<const double> q, const ModelSpec& model) {
  if (static_cast<int>(q.size()) != model.n_modes()) {
    throw ArityMismatch(fmt::format("dressed_potential: {} q values for {} modes", q.size(), model.n_modes()));
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(model.n_electrons));
  double v = bare_potential(x, model.potential);
  for (int a = 0; a < model.n_modes(); ++a) {
    const PhotonMode& m = model.modes[static_cast<std::size_t>(a)];
    const double qa = q[static_cast<std::size_t>(a)];
    const double lx = m.lambda * x;
    v += 0.5 * m.omega * m.omega * qa * qa - m.omega * inv_sqrt_n * qa * lx + 0.5 * lx * lx;
  }
  return v;
}

double dressed_potential(double x, double q, const ModelSpec& model) {
  return dressed_potential(x, std::span<const double>(&q, 1), model);
}

double dressed_interaction(double x, std::span<const double> q, double xp,
                           std::span<const double> qp, const ModelSpec& model) {
  if (static_cast<int>(q.size()) != model.n_modes() || static_cast<int>(qp.size()) != model.n_modes()) {
    throw ArityMismatch(fmt::format("dressed_interaction: got {}/{} q values for {} modes", q.size(),
                                    qp.size(), model.n_modes()));
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(model.n_electrons));
  double w = model.interaction_enabled ? soft_coulomb(x, xp, model.interaction_softening) : 0.0;
  for (int a = 0; a < model.n_modes(); ++a) {
    const PhotonMode& m = model.modes[static_cast<std::size_t>(a)];
    const double qa = q[static_cast<std::size_t>(a)];
    const double qpa = qp[static_cast<std::size_t>(a)];
    w += -m.omega * inv_sqrt_n * m.lambda * (qa * xp + qpa * x) + m.lambda * m.lambda * x * xp;
  }
  return w;
}

double dressed_interaction(double x, double q, double xp, double qp, const ModelSpec& model) {
  return dressed_interaction(x, std::span<const double>(&q, 1), xp, std::span<const double>(&qp, 1), model);
}

void grid_point(const UniformGrid& grid, std::size_t flat, std::span<double> out) {
  for (int a = grid.dim() - 1; a >= 0; --a) {
    const std::size_t n = static_cast<std::size_t>(grid.axis(a).n);
    out[static_cast<std::size_t>(a)] = grid.axis(a).point(static_cast<int>(flat % n));
    flat /= n;
  }
}

OneBodyOperator::OneBodyOperator(const ModelSpec& model, const UniformGrid& grid)
    : grid_(grid), vprime_(grid) {
  if (grid.dim() != 1 + model.n_modes()) {
    throw ArityMismatch(fmt::format("one-body operator needs a grid with 1+{} axes, got {}",
                                    model.n_modes(), grid.dim()));
  }
  std::vector<double> z(static_cast<std::size_t>(grid.dim()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid_point(grid, p, z);
    vprime_.values[static_cast<Eigen::Index>(p)] =
        dressed_potential(z[0], std::span<const double>(z.data() + 1, z.size() - 1), model);
  }
}

void OneBodyOperator::apply(const double* in, double* out) const {
  const std::size_t n = grid_.size();
  const double* v = vprime_.values.data();
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] * in[i];
  add_scaled_laplacian(grid_, in, out, {}, -0.5);
}

Field OneBodyOperator::apply(const Field& f) const {
  if (!f.grid.same_as(grid_)) throw GridMismatch("one-body operator applied to a field on a different grid");
  Field out(grid_);
  apply(f.values.data(), out.values.data());
  return out;
}

namespace {

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  // FNV-1a over the 8 bytes of v.
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffull;
    h *= 0x100000001b3ull;
  }
}

void hash_mix(std::uint64_t& h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  hash_mix(h, bits);
}

} // namespace

std::uint64_t model_hash(const ModelSpec& model, const UniformGrid& grid) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  hash_mix(h, static_cast<std::uint64_t>(model.potential.kind));
  hash_mix(h, model.potential.softening);
  hash_mix(h, model.potential.d);
  hash_mix(h, model.potential.k);
  for (std::size_t i = 0; i < model.potential.xs.size(); ++i) {
    hash_mix(h, model.potential.xs[i]);
    hash_mix(h, model.potential.vs[i]);
  }
  hash_mix(h, model.interaction_softening);
  hash_mix(h, static_cast<std::uint64_t>(model.n_electrons));
  hash_mix(h, static_cast<std::uint64_t>(model.interaction_enabled ? 1 : 0));
  for (const auto& m : model.modes) {
    hash_mix(h, m.omega);
    hash_mix(h, m.lambda);
  }
  hash_mix(h, static_cast<std::uint64_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) {
    hash_mix(h, static_cast<std::uint64_t>(grid.axis(a).n));
    hash_mix(h, grid.axis(a).spacing);
  }
  return h;
}

std::string potential_name(PotentialSpec::Kind kind) {
  switch (kind) {
  case PotentialSpec::Kind::SoftHelium: return "helium";
  case PotentialSpec::Kind::SoftHydrogenMolecule: return "h2";
  case PotentialSpec::Kind::SoftBeryllium: return "beryllium";
  case PotentialSpec::Kind::Harmonic: return "harmonic";
  case PotentialSpec::Kind::Custom: return "custom";
  }
  return "unknown";
}

} // namespace drdmft
