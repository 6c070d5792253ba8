#include "hygronet/reference.hpp"

#include <cmath>

namespace hygronet {
namespace {

std::vector<double> snapped_lines(double l, int n_div, const std::vector<double>& edges) {
  std::vector<double> xs(n_div + 1);
  for (int i = 0; i <= n_div; ++i) xs[i] = l * i / n_div;
  xs.back() = l;
  for (double edge : edges) {
    const int i = static_cast<int>(std::lround(edge / l * n_div));
    if (i <= 0 || i >= n_div)
      throw InputDomainError("reference: fibre edge falls on the cell boundary at this resolution");
    xs[i] = edge;
  }
  for (int i = 1; i <= n_div; ++i)
    if (!(xs[i] > xs[i - 1]))
      throw InputDomainError("reference: snapping grid lines to fibre edges collapses a cell");
  return xs;
}

}  // namespace

ConformingModel build_conforming(Preset preset, int n_div, double width_frac, double l) {
  ConformingModel m;
  m.network = preset_network(preset, width_frac, l);
  m.exact_area = preset_area(preset, width_frac, l);
  std::vector<double> edges;
  if (width_frac > 0.0) edges = {0.5 * width_frac * l, l - 0.5 * width_frac * l};
  const std::vector<double> ys = snapped_lines(l, n_div, edges);
  const std::vector<double> xs =
      preset == Preset::OrthogonalCross ? ys : snapped_lines(l, n_div, {});
  m.mesh = Mesh::periodic_grid(xs, ys);
  const FibreIndex index(m.network);
  CoverageOptions opt;
  opt.mode = CoverageMode::CentroidMembership;
  m.coverage = element_coverage(m.mesh, index, opt);
  return m;
}

PipelineResult reference_solution(const ConformingModel& model, const LoadCase& load,
                                  double delta_chi) {
  return solve_on(model.mesh, model.coverage, model.network, delta_chi, load);
}

FieldSnapshot reference_uniaxial(Preset preset, int n_div, double sigma0, double width_frac) {
  ConformingModel m = build_conforming(preset, n_div, width_frac);
  const double l = m.network.cell_size;
  const LoadCase load = LoadCase::macro_stress(Vec3(sigma0 * m.exact_area / (l * l), 0.0, 0.0));
  PipelineResult run = reference_solution(m, load, 0.0);
  return make_snapshot(std::move(m.network), std::move(run), sigma0, 0.0, m.exact_area);
}

EffectiveExpansion reference_expansion(Preset preset, int n_div, double width_frac,
                                       double delta_chi) {
  const ConformingModel m = build_conforming(preset, n_div, width_frac);
  const PipelineResult run = reference_solution(m, LoadCase::free_swelling(), delta_chi);
  return summarize(run, m.network, delta_chi);
}

}  // namespace hygronet
