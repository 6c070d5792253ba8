#include "hygronet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace hygronet {
namespace {

// Top 53 bits of a 64-bit draw mapped to [0, 1).
double unit_closed_open(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// Same lattice shifted by half a step: strictly inside (0, 1).
double unit_open(std::uint64_t x) { return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

void Material::validate() const {
  if (!(E_l > 0.0) || !(E_t > 0.0) || !(G_lt > 0.0))
    throw InputDomainError("material: moduli E_l, E_t and G_lt must be positive");
  if (!(1.0 - nu_lt * nu_tl > 0.0))
    throw InputDomainError("material: 1 - nu_lt*nu_tl must be positive");
  const double lhs = E_l * nu_tl;
  const double rhs = E_t * nu_lt;
  if (std::abs(lhs - rhs) > 1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1e-300})) {
    std::ostringstream os;
    os << "material: stiffness is not symmetric (E_l*nu_tl = " << lhs << ", E_t*nu_lt = " << rhs
       << ")";
    throw InputDomainError(os.str());
  }
  if (!std::isfinite(beta_l) || !std::isfinite(beta_t))
    throw InputDomainError("material: expansivities must be finite");
}

Material default_material() { return Material{}; }

const Material& Network::material_of(const Fibre& f) const {
  return materials.at(static_cast<std::size_t>(f.material));
}

void Network::validate() const {
  if (!(cell_size > 0.0)) throw InputDomainError("network: cell size must be positive");
  if (!(q >= 0.0 && q < 1.0)) throw InputDomainError("network: q must lie in [0, 1)");
  if (materials.empty()) throw InputDomainError("network: no materials");
  for (const auto& m : materials) m.validate();
  for (std::size_t i = 0; i < fibres.size(); ++i) {
    const Fibre& f = fibres[i];
    if (!(f.length > 0.0) || !(f.width > 0.0) || !(f.thickness > 0.0))
      throw InputDomainError("network: fibre " + std::to_string(i) +
                             " needs positive length, width and thickness");
    if (!(f.centroid.x() >= 0.0 && f.centroid.x() < cell_size && f.centroid.y() >= 0.0 &&
          f.centroid.y() < cell_size))
      throw InputDomainError("network: fibre " + std::to_string(i) + " centroid outside the cell");
    if (f.material < 0 || static_cast<std::size_t>(f.material) >= materials.size())
      throw InputDomainError("network: fibre " + std::to_string(i) + " has unknown material");
    if (!std::isfinite(f.theta))
      throw InputDomainError("network: fibre " + std::to_string(i) + " has non-finite angle");
  }
}

double coverage(const Network& network) {
  double sum = 0.0;
  for (const auto& f : network.fibres) sum += f.length * f.width;
  return sum / (network.cell_size * network.cell_size);
}

double sample_orientation(double q, double u) {
  if (!(q >= 0.0 && q < 1.0)) throw InputDomainError("sample_orientation: q must lie in [0, 1)");
  if (!(u > 0.0 && u < 1.0)) throw InputDomainError("sample_orientation: u must lie in (0, 1)");
  const double ratio = (1.0 - q) / (1.0 + q);
  return std::atan(ratio * std::tan(std::numbers::pi * (u - 0.5)));
}

std::size_t fibre_count_for_coverage(double target_coverage, double cell_size,
                                     double fibre_length, double fibre_width) {
  if (!(target_coverage > 0.0)) throw InputDomainError("generate: coverage must be positive");
  if (!(cell_size > 0.0) || !(fibre_length > 0.0) || !(fibre_width > 0.0))
    throw InputDomainError("generate: lengths must be positive");
  const double exact = target_coverage * cell_size * cell_size / (fibre_length * fibre_width);
  // Ratios such as 0.9 * (5/3)^2 * 10 land a few ulps above an integer.
  return static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
}

Network generate_network(const GenerationParams& p) {
  if (!(p.q >= 0.0 && p.q < 1.0)) throw InputDomainError("generate: q must lie in [0, 1)");
  if (!(p.thickness > 0.0)) throw InputDomainError("generate: thickness must be positive");
  p.material.validate();
  const std::size_t n =
      fibre_count_for_coverage(p.target_coverage, p.cell_size, p.fibre_length, p.fibre_width);

  Network net;
  net.cell_size = p.cell_size;
  net.q = p.q;
  net.seed = p.seed;
  net.materials = {p.material};
  net.fibres.resize(n);

  std::mt19937_64 rng(p.seed);
  for (auto& f : net.fibres) {
    const double x = unit_closed_open(rng()) * p.cell_size;
    const double y = unit_closed_open(rng()) * p.cell_size;
    // Rounding can push l*u up to l itself.
    f.centroid = {x < p.cell_size ? x : 0.0, y < p.cell_size ? y : 0.0};
    f.length = p.fibre_length;
    f.width = p.fibre_width;
    f.thickness = p.thickness;
    f.material = 0;
  }
  for (auto& f : net.fibres) f.theta = sample_orientation(p.q, unit_open(rng()));
  return net;
}

}  // namespace hygronet
