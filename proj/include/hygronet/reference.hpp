#pragma once

#include "hygronet/homog.hpp"

namespace hygronet {

/// Preset discretized on a grid whose lines pass through every fibre edge,
/// so each element is wholly inside or outside each fibre.
struct ConformingModel {
  Network network;
  Mesh mesh;
  ElementCoverage coverage;
  double exact_area = 0.0;
};

/// Uniform grid lines with the nearest line to each fibre edge moved onto
/// it. Throws InputDomainError when a move would collapse a grid cell.
ConformingModel build_conforming(Preset preset, int n_div, double width_frac = 0.43,
                                 double cell_size = 1.0);

/// Same assembly and solver as the non-conforming path.
PipelineResult reference_solution(const ConformingModel& model, const LoadCase& load,
                                  double delta_chi = 0.0);

/// Parallel strip load on the conforming model.
FieldSnapshot reference_uniaxial(Preset preset, int n_div, double sigma0,
                                 double width_frac = 0.43);

/// Free-swelling effective expansivity of the conforming model.
EffectiveExpansion reference_expansion(Preset preset, int n_div, double width_frac = 0.43,
                                       double delta_chi = 1.0);

}  // namespace hygronet
