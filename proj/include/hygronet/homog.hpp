#pragma once

#include "hygronet/assembly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hygronet {

enum class Discretization {
  LsXfem,       ///< sub-triangulated Heaviside quadrature
  CentroidFem,  ///< element belongs to a fibre iff its centroid does
};

struct MeshOptions {
  int n_div = 100;
  int levels = 0;  ///< interface refinement passes
  int generation_cap = 12;
  double tol_frac = 1.0 / 1024.0;
  Discretization disc = Discretization::LsXfem;
};

struct Timings {
  double mesh = 0.0;
  double coverage = 0.0;
  double assembly = 0.0;
  double solve = 0.0;
  double total() const { return mesh + coverage + assembly + solve; }
};

struct PipelineResult {
  Mesh mesh;
  ElementCoverage coverage;
  LinearSystem system;
  SolveResult solution;
  Timings timings;
};

/// Structured mesh, optional interface refinement, coverage, assembly and
/// solve.
PipelineResult run_pipeline(const Network& network, const MeshOptions& options, double delta_chi,
                            const LoadCase& load);

/// Assembly and solve on a given mesh and coverage.
PipelineResult solve_on(Mesh mesh, ElementCoverage coverage, const Network& network,
                        double delta_chi, const LoadCase& load);

struct EffectiveExpansion {
  Vec3 beta = Vec3::Zero();  ///< (xx, yy, xy), engineering shear
  double beta_l = 1.0;       ///< normalization

  // Diagnostics.
  std::size_t nodes = 0;
  std::size_t elements = 0;
  std::size_t dofs = 0;
  std::size_t components = 0;
  std::size_t pinned_dofs = 0;
  int macro_rank = 3;
  bool regularized = false;
  double residual = 0.0;
  double modelled_area = 0.0;
  QuadratureStats quadrature;
  Timings timings;

  Vec3 normalized() const { return beta / beta_l; }
};

EffectiveExpansion summarize(const PipelineResult& run, const Network& network, double delta_chi);

/// eps_bar / delta_chi from a free-swelling solve. Throws
/// DisconnectedStructureError when no fibre path spans the cell in both
/// directions, so that some macroscopic strain is left undetermined.
EffectiveExpansion effective_expansion(const Network& network, const MeshOptions& options,
                                       double delta_chi = 1.0);

enum class Preset {
  ParallelStrip,    ///< one horizontal fibre of width w centred on y = 0
  OrthogonalCross,  ///< plus one vertical fibre centred on x = 0
};

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);

/// Spanning fibres of length l; width is a fraction of l.
Network preset_network(Preset preset, double width_frac = 0.43, double cell_size = 1.0);

/// Sum of exact fibre areas of a preset (overlaps counted once per fibre).
double preset_area(Preset preset, double width_frac = 0.43, double cell_size = 1.0);

struct FieldSnapshot {
  Network network;
  PipelineResult run;
  double sigma0 = 0.0;
  double delta_chi = 0.0;
  double exact_area = 0.0;
  double magnification = 50.0;

  /// eps / (beta_l dchi), or eps / sigma0 * E_l when dchi = 0.
  Vec3 normalized_strain(int element) const;
  /// sigma / sigma0 of one fibre in one element; nullopt if absent.
  std::optional<Vec3> normalized_stress(int element, int fibre) const;
  /// Area-weighted mean fibre stress over all covered elements, / sigma0.
  Vec3 mean_fibre_stress() const;
  /// Modelled over exact fibre area.
  double area_ratio() const;
  std::vector<Vec2> deformed_nodes() const;
};

/// Horizontal load sigma0 * A0 / l^2 (total force sigma0 * A0 / l per unit
/// depth and thickness) on a preset, no moisture change.
FieldSnapshot uniaxial_case(Preset preset, double sigma0, const MeshOptions& options,
                            double width_frac = 0.43);

/// Wraps a finished run into a snapshot.
FieldSnapshot make_snapshot(Network network, PipelineResult run, double sigma0,
                            double delta_chi, double exact_area);

struct FieldSelector {
  enum class Quantity { Strain, Stress } quantity = Quantity::Stress;
  int component = 0;  ///< 0 xx, 1 yy, 2 xy
  int fibre = -1;     ///< stress of this fibre; -1 for the area-weighted mean
};

struct ProfilePoint {
  double s = 0.0;  ///< arc length from the segment start
  Vec2 x = Vec2::Zero();
  std::optional<double> value;  ///< empty in void
};

/// Samples element values at the midpoints of n equal pieces of [a, b].
std::vector<ProfilePoint> sample_cross_section(const FieldSnapshot& snapshot, const Vec2& a,
                                               const Vec2& b, int n,
                                               const FieldSelector& selector = {});

struct ConvergenceRow {
  int n_div = 0;
  double h = 0.0;
  EffectiveExpansion result;
};

/// One run per mesh size. n_divs must be ascending (h descending).
std::vector<ConvergenceRow> convergence_study(const Network& network,
                                              const std::vector<int>& n_divs,
                                              const MeshOptions& base, double delta_chi = 1.0);

}  // namespace hygronet
