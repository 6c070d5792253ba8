#pragma once

#include "hygronet/types.hpp"

#include <cstdint>
#include <vector>

namespace hygronet {

/// Transversely isotropic plane-stress fibre material with hygro-expansion.
struct Material {
  double E_l = 1.0;
  double E_t = 0.25;
  double G_lt = 0.1;
  double nu_lt = 0.2;
  double nu_tl = 0.05;
  double beta_l = 1.0;
  double beta_t = 20.0;

  /// Throws InputDomainError on non-positive moduli, a non-positive
  /// 1 - nu_lt*nu_tl, or an asymmetric stiffness (E_l*nu_tl != E_t*nu_lt).
  void validate() const;

  bool operator==(const Material&) const = default;
};

/// Normalized defaults: E_t = E_l/4, G_lt = 0.1 E_l, nu_lt = 0.2,
/// nu_tl = nu_lt/4, beta_t = 20 beta_l.
Material default_material();

/// A straight rectangular fibre. theta is measured from the x axis.
struct Fibre {
  Vec2 centroid = Vec2::Zero();
  double theta = 0.0;
  double length = 1.0;
  double width = 0.1;
  double thickness = 1.0;
  int material = 0;

  bool operator==(const Fibre&) const = default;
};

/// Periodic square unit cell [0, cell_size)^2 populated with fibres.
struct Network {
  double cell_size = 1.0;
  std::vector<Fibre> fibres;
  std::vector<Material> materials{default_material()};
  double q = 0.0;
  std::uint64_t seed = 0;

  const Material& material_of(const Fibre& f) const;
  /// Checks fibre dimensions, centroid range, material references and q.
  void validate() const;

  bool operator==(const Network&) const = default;
};

/// Sum of fibre areas over the cell area; overlaps are counted once per fibre.
double coverage(const Network& network);

/// Inverse CDF of the orientation density
/// f(theta) = (1 - q^2) / (pi (1 + q^2 - 2 q cos 2 theta)) on (-pi/2, pi/2).
double sample_orientation(double q, double u);

struct GenerationParams {
  double cell_size = 1.0;
  double fibre_length = 0.6;
  double fibre_width = 0.06;
  double target_coverage = 0.9;
  double q = 0.0;
  std::uint64_t seed = 0;
  double thickness = 1.0;
  Material material = default_material();
};

/// Number of fibres needed to reach at least the target coverage.
std::size_t fibre_count_for_coverage(double target_coverage, double cell_size,
                                     double fibre_length, double fibre_width);

/// Draw order is fixed: for each fibre (x, y) of the centroid from one
/// mt19937_64 stream, then all orientations from the same stream. Variates
/// are built from the top 53 bits of each draw, so a seed reproduces the
/// same network on every platform.
Network generate_network(const GenerationParams& params);

}  // namespace hygronet
