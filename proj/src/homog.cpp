#include "hygronet/homog.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hygronet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

PipelineResult solve_on(Mesh mesh, ElementCoverage coverage, const Network& network,
                        double delta_chi, const LoadCase& load) {
  PipelineResult out;
  out.mesh = std::move(mesh);
  out.coverage = std::move(coverage);
  auto t0 = Clock::now();
  out.system = assemble(out.mesh, out.coverage, network, delta_chi, load);
  pin_floating_components(out.system, out.mesh);
  out.timings.assembly = seconds_since(t0);
  t0 = Clock::now();
  out.solution = solve(out.system, out.mesh);
  out.timings.solve = seconds_since(t0);
  return out;
}

PipelineResult run_pipeline(const Network& network, const MeshOptions& options, double delta_chi,
                            const LoadCase& load) {
  network.validate();
  auto t0 = Clock::now();
  Mesh mesh = build_structured_mesh(network.cell_size, options.n_div);
  const FibreIndex index(network);
  refine_to_interface(mesh, index, options.levels, options.generation_cap);
  const double t_mesh = seconds_since(t0);

  t0 = Clock::now();
  CoverageOptions cov;
  cov.tol_frac = options.tol_frac;
  cov.mode = options.disc == Discretization::LsXfem ? CoverageMode::SubTriangulation
                                                    : CoverageMode::CentroidMembership;
  ElementCoverage coverage = element_coverage(mesh, index, cov);
  const double t_cov = seconds_since(t0);

  PipelineResult out = solve_on(std::move(mesh), std::move(coverage), network, delta_chi, load);
  out.timings.mesh = t_mesh;
  out.timings.coverage = t_cov;
  return out;
}

EffectiveExpansion summarize(const PipelineResult& run, const Network& network, double delta_chi) {
  EffectiveExpansion e;
  e.beta = run.solution.eps_bar / delta_chi;
  e.beta_l = network.materials.front().beta_l;
  e.nodes = run.mesh.node_count();
  e.elements = run.mesh.element_count();
  e.dofs = static_cast<std::size_t>(run.system.size());
  e.components = run.system.components.size();
  e.pinned_dofs = run.solution.pinned_dofs;
  e.macro_rank = run.solution.macro_rank;
  e.regularized = run.solution.regularized;
  e.residual = run.solution.residual;
  e.modelled_area = run.coverage.total_area();
  e.quadrature = run.coverage.stats;
  e.timings = run.timings;
  return e;
}

EffectiveExpansion effective_expansion(const Network& network, const MeshOptions& options,
                                       double delta_chi) {
  if (delta_chi == 0.0 || !std::isfinite(delta_chi))
    throw InputDomainError("effective_expansion: moisture change must be finite and non-zero");
  const PipelineResult run =
      run_pipeline(network, options, delta_chi, LoadCase::free_swelling());
  if (run.solution.macro_rank < 3) {
    std::ostringstream os;
    os << "effective_expansion: only " << run.solution.macro_rank
       << " of 3 macroscopic strains are resisted by the structure ("
       << run.system.components.size() << " components)";
    throw DisconnectedStructureError(os.str());
  }
  return summarize(run, network, delta_chi);
}

Preset parse_preset(const std::string& name) {
  if (name == "parallel_strip" || name == "PARALLEL_STRIP") return Preset::ParallelStrip;
  if (name == "orthogonal_cross" || name == "ORTHOGONAL_CROSS") return Preset::OrthogonalCross;
  throw InputDomainError("unknown preset '" + name + "'");
}

std::string preset_name(Preset p) {
  return p == Preset::ParallelStrip ? "parallel_strip" : "orthogonal_cross";
}

Network preset_network(Preset preset, double width_frac, double l) {
  if (!(width_frac >= 0.0 && width_frac < 1.0))
    throw InputDomainError("preset: width fraction must lie in [0, 1)");
  Network net;
  net.cell_size = l;
  if (width_frac == 0.0) return net;
  Fibre h;
  h.centroid = Vec2(0.5 * l, 0.0);
  h.theta = 0.0;
  h.length = l;
  h.width = width_frac * l;
  net.fibres.push_back(h);
  if (preset == Preset::OrthogonalCross) {
    Fibre v = h;
    v.centroid = Vec2(0.0, 0.5 * l);
    v.theta = 0.5 * std::numbers::pi;
    net.fibres.push_back(v);
  }
  return net;
}

double preset_area(Preset preset, double width_frac, double l) {
  return (preset == Preset::OrthogonalCross ? 2.0 : 1.0) * width_frac * l * l;
}

Vec3 FieldSnapshot::normalized_strain(int element) const {
  const Vec3& eps = run.solution.element_strain[element];
  const double beta_l = network.materials.front().beta_l;
  if (delta_chi != 0.0) return eps / (beta_l * delta_chi);
  if (sigma0 != 0.0) return eps * network.materials.front().E_l / sigma0;
  return eps;
}

std::optional<Vec3> FieldSnapshot::normalized_stress(int element, int fibre) const {
  for (const auto& fs : run.solution.fibre_stress[element])
    if (fs.fibre == fibre) return sigma0 != 0.0 ? Vec3(fs.stress / sigma0) : fs.stress;
  return std::nullopt;
}

Vec3 FieldSnapshot::mean_fibre_stress() const {
  Vec3 sum = Vec3::Zero();
  double weight = 0.0;
  const auto& elems = run.system.elements;
  for (std::size_t e = 0; e < elems.size(); ++e)
    for (std::size_t k = 0; k < elems[e].terms.size(); ++k) {
      const double w = elems[e].terms[k].area * elems[e].terms[k].thickness;
      sum += w * run.solution.fibre_stress[e][k].stress;
      weight += w;
    }
  if (weight == 0.0) return Vec3::Zero();
  sum /= weight;
  return sigma0 != 0.0 ? Vec3(sum / sigma0) : sum;
}

double FieldSnapshot::area_ratio() const {
  return exact_area > 0.0 ? run.coverage.total_area() / exact_area : 0.0;
}

std::vector<Vec2> FieldSnapshot::deformed_nodes() const {
  std::vector<Vec2> out(run.mesh.node_count());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = run.mesh.nodes()[n] +
             magnification * run.solution.displacement(run.mesh, static_cast<int>(n));
  return out;
}

FieldSnapshot make_snapshot(Network network, PipelineResult run, double sigma0, double delta_chi,
                            double exact_area) {
  FieldSnapshot s;
  s.network = std::move(network);
  s.run = std::move(run);
  s.sigma0 = sigma0;
  s.delta_chi = delta_chi;
  s.exact_area = exact_area;
  return s;
}

FieldSnapshot uniaxial_case(Preset preset, double sigma0, const MeshOptions& options,
                            double width_frac) {
  if (!std::isfinite(sigma0)) throw InputDomainError("uniaxial: sigma0 must be finite");
  Network net = preset_network(preset, width_frac);
  const double l = net.cell_size;
  const double a0 = preset_area(preset, width_frac, l);
  const LoadCase load = LoadCase::macro_stress(Vec3(sigma0 * a0 / (l * l), 0.0, 0.0));
  PipelineResult run = run_pipeline(net, options, 0.0, load);
  return make_snapshot(std::move(net), std::move(run), sigma0, 0.0, a0);
}

namespace {

// Bucket grid over element bounding boxes for point location.
class ElementLocator {
 public:
  explicit ElementLocator(const Mesh& mesh) : mesh_(mesh) {
    Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (const auto& x : mesh.nodes()) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    lo_ = lo;
    nb_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.element_count())) / 2));
    size_ = (hi - lo).cwiseMax(Vec2(1e-300, 1e-300)) / nb_;
    buckets_.resize(static_cast<std::size_t>(nb_) * nb_);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
      const Box b = bounding_box(mesh.triangle(static_cast<int>(e)));
      const auto [x0, y0] = cell(b.lo);
      const auto [x1, y1] = cell(b.hi);
      for (int j = y0; j <= y1; ++j)
        for (int i = x0; i <= x1; ++i) buckets_[j * nb_ + i].push_back(static_cast<int>(e));
    }
  }

  int locate(const Vec2& p) const {
    const auto [i, j] = cell(p);
    for (int e : buckets_[j * nb_ + i]) {
      const Triangle t = mesh_.triangle(e);
      const double a = signed_area(t);
      const double tol = -1e-12 * a;
      if (signed_area({p, t[1], t[2]}) >= tol && signed_area({t[0], p, t[2]}) >= tol &&
          signed_area({t[0], t[1], p}) >= tol)
        return e;
    }
    return -1;
  }

 private:
  std::pair<int, int> cell(const Vec2& x) const {
    const Vec2 r = (x - lo_).cwiseQuotient(size_);
    return {std::clamp(static_cast<int>(std::floor(r.x())), 0, nb_ - 1),
            std::clamp(static_cast<int>(std::floor(r.y())), 0, nb_ - 1)};
  }

  const Mesh& mesh_;
  Vec2 lo_;
  Vec2 size_;
  int nb_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

std::vector<ProfilePoint> sample_cross_section(const FieldSnapshot& snap, const Vec2& a,
                                               const Vec2& b, int n,
                                               const FieldSelector& sel) {
  if (n <= 0) throw InputDomainError("sample_cross_section: need at least one sample");
  if (sel.component < 0 || sel.component > 2)
    throw InputDomainError("sample_cross_section: component must be 0, 1 or 2");
  const ElementLocator locator(snap.run.mesh);
  const double len = (b - a).norm();
  std::vector<ProfilePoint> out(n);
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    ProfilePoint& p = out[k];
    p.x = a + t * (b - a);
    p.s = t * len;
    const int e = locator.locate(p.x);
    if (e < 0 || snap.run.system.elements[e].terms.empty()) continue;
    if (sel.quantity == FieldSelector::Quantity::Strain) {
      p.value = snap.normalized_strain(e)[sel.component];
    } else if (sel.fibre >= 0) {
      if (auto s = snap.normalized_stress(e, sel.fibre)) p.value = (*s)[sel.component];
    } else {
      const auto& terms = snap.run.system.elements[e].terms;
      double sum = 0.0;
      double w = 0.0;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        sum += terms[i].area * snap.run.solution.fibre_stress[e][i].stress[sel.component];
        w += terms[i].area;
      }
      p.value = snap.sigma0 != 0.0 ? sum / w / snap.sigma0 : sum / w;
    }
  }
  return out;
}

std::vector<ConvergenceRow> convergence_study(const Network& network,
                                              const std::vector<int>& n_divs,
                                              const MeshOptions& base, double delta_chi) {
  for (std::size_t i = 1; i < n_divs.size(); ++i)
    if (n_divs[i] <= n_divs[i - 1])
      throw InputDomainError("convergence_study: mesh sizes must be strictly decreasing");
  std::vector<ConvergenceRow> rows;
  for (int n : n_divs) {
    MeshOptions opt = base;
    opt.n_div = n;
    rows.push_back({n, network.cell_size / n, effective_expansion(network, opt, delta_chi)});
  }
  return rows;
}

}  // namespace hygronet
