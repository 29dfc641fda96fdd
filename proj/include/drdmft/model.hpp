#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drdmft/grid.hpp"

namespace drdmft {

/// Local external potential family. All Coulomb terms are softened.
struct PotentialSpec {
  enum class Kind { SoftHelium, SoftHydrogenMolecule, SoftBeryllium, Harmonic, Custom };

  Kind kind = Kind::SoftHelium;
  double softening = 1.0; // bohr
  double d = 0.0;         // half separation of the two H wells (bohr)
  double k = 1.0;         // harmonic force constant

  // Custom: tabulated samples, linearly interpolated, clamped outside.
  std::vector<double> xs;
  std::vector<double> vs;

  static PotentialSpec soft_helium(double softening = 1.0);
  static PotentialSpec soft_hydrogen_molecule(double d, double softening = 1.0);
  static PotentialSpec soft_beryllium(double softening = 0.5);
  static PotentialSpec harmonic(double k);
  static PotentialSpec custom(std::vector<double> xs, std::vector<double> vs);
};

struct PhotonMode {
  double omega = 1.0;  // hartree
  double lambda = 0.0; // coupling amplitude (1D scalar, sign absorbed)
};

struct Coupling {
  double g = 0.0;
  double g_over_omega = 0.0;
};

/// g = |lambda| * sqrt(omega/2) and its dimensionless ratio g/omega.
Coupling effective_coupling(const PhotonMode& mode);
/// Inverse map: lambda reproducing a requested g/omega at frequency omega.
double lambda_for(double g_over_omega, double omega);

struct ModelSpec {
  PotentialSpec potential;
  double interaction_softening = 1.0;
  int n_electrons = 2; // even, closed shell
  std::vector<PhotonMode> modes;
  bool interaction_enabled = true;

  int n_modes() const { return static_cast<int>(modes.size()); }
};

double bare_potential(double x, const PotentialSpec& spec);
double soft_coulomb(double x, double xp, double softening);

/// Softened repulsion between the two nuclei of the H2 model (distance 2d);
/// zero for the single-center and harmonic families.
double nuclear_repulsion(const PotentialSpec& spec);

/// Dressed local potential v'(z) = v(x) + sum_a [ w_a^2 q_a^2 / 2
///   - (w_a/sqrt(N)) q_a (l_a x) + (l_a x)^2 / 2 ].
double dressed_potential(double x, std::span<const double> q, const ModelSpec& model);
double dressed_potential(double x, double q, const ModelSpec& model); // single mode

/// Dressed kernel w'(z,z') = w(x,x') + sum_a [ -(w_a/sqrt(N)) l_a (q_a x' + q_a' x)
///   + l_a^2 x x' ]. The Coulomb part is dropped when interaction is disabled.
double dressed_interaction(double x, std::span<const double> q, double xp,
                           std::span<const double> qp, const ModelSpec& model);
double dressed_interaction(double x, double q, double xp, double qp, const ModelSpec& model);

/// Matrix-free dressed one-body operator h(z) = -Laplacian/2 + v'(z) on a grid
/// with one x axis followed by one q axis per mode.
class OneBodyOperator {
public:
  OneBodyOperator(const ModelSpec& model, const UniformGrid& grid);

  const UniformGrid& grid() const { return grid_; }
  const Field& potential() const { return vprime_; }
  std::size_t dim() const { return grid_.size(); }

  void apply(const double* in, double* out) const;
  Field apply(const Field& f) const;

private:
  UniformGrid grid_;
  Field vprime_;
};

/// Coordinate values of a flat grid index, axis order (x, q_1, ..., q_M).
void grid_point(const UniformGrid& grid, std::size_t flat, std::span<double> out);

/// Stable fingerprint of a model + grid combination (used by caches and the
/// checkpoint container).
std::uint64_t model_hash(const ModelSpec& model, const UniformGrid& grid);
std::string potential_name(PotentialSpec::Kind kind);

} // namespace drdmft
