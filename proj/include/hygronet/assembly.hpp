#pragma once

#include "hygronet/constitutive.hpp"
#include "hygronet/mesh.hpp"
#include "hygronet/quadrature.hpp"

#include <Eigen/Sparse>

#include <span>
#include <vector>

namespace hygronet {

using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Constant strain-displacement matrix of a linear triangle, DOF order
/// (u0x, u0y, u1x, u1y, u2x, u2y).
Mat36 strain_displacement(const Triangle& tri);

/// One fibre's share of an element: occupied area times thickness, with the
/// fibre's law in the global frame.
struct CoverageTerm {
  int fibre = -1;
  double area = 0.0;
  double thickness = 1.0;
  ConstitutiveGlobal law;
};

/// Element matrices for u = eps_bar . x + w. The element strain is
/// B w_e + eps_bar, so the macro blocks use the identity in place of B.
struct ElementContribution {
  Mat6 K = Mat6::Zero();
  Vec6 f = Vec6::Zero();
  Mat63 K_coupling = Mat63::Zero();  ///< sum A t B^T D
  Mat3 K_macro = Mat3::Zero();       ///< sum A t D
  Vec3 f_macro = Vec3::Zero();       ///< sum A t D beta dchi
};

ElementContribution element_contrib(const Triangle& tri, std::span<const CoverageTerm> terms,
                                    double delta_chi);

enum class LoadKind {
  FreeSwelling,  ///< hygroscopic load, zero macroscopic stress
  MacroStress,   ///< prescribed average stress, no moisture change
  MacroStrain,   ///< prescribed eps_bar (used for patch tests)
};

struct LoadCase {
  LoadKind kind = LoadKind::FreeSwelling;
  Vec3 value = Vec3::Zero();  ///< stress (xx, yy, xy) or strain (xx, yy, gamma_xy)
  double thickness = 1.0;     ///< depth used to turn average stress into force

  static LoadCase free_swelling() { return {}; }
  static LoadCase macro_stress(const Vec3& sigma, double thickness = 1.0) {
    return {LoadKind::MacroStress, sigma, thickness};
  }
  static LoadCase macro_strain(const Vec3& eps) { return {LoadKind::MacroStrain, eps, 1.0}; }
};

struct ElementData {
  std::array<int, 3> nodes{};  ///< mesh node ids (not canonical)
  Mat36 B = Mat36::Zero();
  std::vector<CoverageTerm> terms;
};

/// A group of active elements connected through shared nodes.
struct Component {
  std::vector<int> nodes;   ///< canonical node ids
  int wrap_rank = 0;        ///< lattice directions the component spans periodically
  bool anchor = false;
  std::vector<Eigen::Index> pinned;
};

/// Global system over canonical-node DOFs followed by three macro DOFs
/// (eps_xx, eps_yy, gamma_xy).
struct LinearSystem {
  SparseMatrix K;
  Eigen::VectorXd f;
  std::vector<int> node_dof;  ///< canonical node -> first DOF, -1 if inactive
  std::vector<int> dof_node;  ///< DOF pair index -> canonical node
  Eigen::Index macro_dof = 0;
  std::vector<char> pinned;   ///< per DOF
  std::vector<Component> components;
  std::vector<ElementData> elements;
  LoadCase load;
  double delta_chi = 0.0;
  double cell_size = 1.0;
  std::size_t dropped_dofs = 0;
  std::size_t floating_components = 0;  ///< non-wrapping components besides the anchor

  Eigen::Index nodal_dofs() const { return macro_dof; }
  Eigen::Index size() const { return macro_dof + 3; }
  std::size_t pinned_count() const;
};

/// Assembles K and f. Canonical nodes share DOFs, so fluctuations are
/// periodic. Nodal DOFs whose diagonal is below 1e-12 of the largest are
/// removed.
LinearSystem assemble(const Mesh& mesh, const ElementCoverage& coverage, const Network& network,
                      double delta_chi, const LoadCase& load);

/// Removes the rigid motions of every connected component of the active
/// element graph: three pinned DOFs for a component that does not wrap
/// around the cell, two (translation only) for one that does. The anchor
/// component is the one holding the active node nearest the cell centre.
void pin_floating_components(LinearSystem& system, const Mesh& mesh);

struct FibreStress {
  int fibre = -1;
  Vec3 stress = Vec3::Zero();
};

struct SolveResult {
  std::vector<Vec2> fluctuation;  ///< w per mesh node (images copy masters)
  Vec3 eps_bar = Vec3::Zero();
  std::vector<Vec3> element_strain;
  std::vector<std::vector<FibreStress>> fibre_stress;
  double residual = 0.0;
  int macro_rank = 3;
  bool regularized = false;
  std::size_t pinned_dofs = 0;

  /// Total displacement eps_bar . x + w at a mesh node.
  Vec2 displacement(const Mesh& mesh, int node) const;
};

/// Sparse LDL^T of the pinned nodal block, static condensation onto the
/// macro DOFs, then recovery of strains and per-fibre stresses.
SolveResult solve(const LinearSystem& system, const Mesh& mesh);

/// Total potential energy 1/2 u^T K u - u^T f at a solution.
double potential_energy(const LinearSystem& system, const SolveResult& result, const Mesh& mesh);

/// Full DOF vector (nodal followed by macro) of a solution.
Eigen::VectorXd dof_vector(const LinearSystem& system, const SolveResult& result, const Mesh& mesh);

}  // namespace hygronet
