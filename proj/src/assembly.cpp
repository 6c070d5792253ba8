#include "hygronet/assembly.hpp"

#include "hygronet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hygronet {

Mat36 strain_displacement(const Triangle& t) {
  const double a2 = 2.0 * signed_area(t);
  if (!(a2 > 0.0)) throw InputDomainError("strain_displacement: triangle must be CCW");
  Mat36 B = Mat36::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = t[(i + 1) % 3];
    const Vec2& pk = t[(i + 2) % 3];
    const double b = (pj.y() - pk.y()) / a2;  // dN_i/dx
    const double c = (pk.x() - pj.x()) / a2;  // dN_i/dy
    B(0, 2 * i) = b;
    B(1, 2 * i + 1) = c;
    B(2, 2 * i) = c;
    B(2, 2 * i + 1) = b;
  }
  return B;
}

ElementContribution element_contrib(const Triangle& tri, std::span<const CoverageTerm> terms,
                                    double delta_chi) {
  const Mat36 B = strain_displacement(tri);
  ElementContribution out;
  for (const auto& term : terms) {
    const double w = term.area * term.thickness;
    const Mat3 wD = w * term.law.D;
    const Vec3 s = wD * term.law.beta * delta_chi;
    out.K_macro += wD;
    out.f_macro += s;
    out.K_coupling += B.transpose() * wD;
    out.f += B.transpose() * s;
  }
  out.K = out.K_coupling * B;
  return out;
}

std::size_t LinearSystem::pinned_count() const {
  return static_cast<std::size_t>(std::count(pinned.begin(), pinned.end(), char{1}));
}

LinearSystem assemble(const Mesh& mesh, const ElementCoverage& coverage, const Network& network,
                      double delta_chi, const LoadCase& load) {
  if (coverage.entries.size() != mesh.element_count())
    throw InputDomainError("assemble: coverage does not match the mesh");
  if (!mesh.periodic()) throw InputDomainError("assemble: the mesh must be periodic");
  if (!std::isfinite(delta_chi)) throw InputDomainError("assemble: moisture change must be finite");

  LinearSystem sys;
  sys.load = load;
  sys.delta_chi = delta_chi;
  sys.cell_size = mesh.cell_size();

  std::vector<ConstitutiveGlobal> laws(network.fibres.size());
  for (std::size_t i = 0; i < laws.size(); ++i)
    laws[i] = constitutive_global(network.material_of(network.fibres[i]), network.fibres[i].theta);

  const std::size_t ne = mesh.element_count();
  sys.elements.resize(ne);
  std::vector<ElementContribution> contrib(ne);
  parallel_for(ne, [&](std::size_t e) {
    const auto& entries = coverage.entries[e];
    if (entries.empty()) return;
    ElementData& data = sys.elements[e];
    data.nodes = mesh.elements()[e].v;
    const Triangle t = mesh.triangle(static_cast<int>(e));
    data.B = strain_displacement(t);
    data.terms.reserve(entries.size());
    for (const auto& fa : entries)
      data.terms.push_back({fa.fibre, fa.area, network.fibres[fa.fibre].thickness, laws[fa.fibre]});
    contrib[e] = element_contrib(t, data.terms, delta_chi);
  });

  // Diagonal per canonical node to detect DOFs carried by negligible area.
  const std::size_t nn = mesh.node_count();
  std::vector<Vec2> diag(nn, Vec2::Zero());
  for (std::size_t e = 0; e < ne; ++e) {
    if (sys.elements[e].terms.empty()) continue;
    for (int a = 0; a < 3; ++a) {
      const int m = mesh.master(sys.elements[e].nodes[a]);
      diag[m] += Vec2(contrib[e].K(2 * a, 2 * a), contrib[e].K(2 * a + 1, 2 * a + 1));
    }
  }
  double max_diag = 0.0;
  for (const auto& d : diag) max_diag = std::max(max_diag, d.maxCoeff());

  sys.node_dof.assign(nn, -1);
  int next = 0;
  for (std::size_t n = 0; n < nn; ++n) {
    if (mesh.master(static_cast<int>(n)) != static_cast<int>(n)) continue;
    if (diag[n].maxCoeff() <= 0.0) continue;
    if (diag[n].minCoeff() < 1e-12 * max_diag) {
      sys.dropped_dofs += 2;
      continue;
    }
    sys.node_dof[n] = next;
    sys.dof_node.push_back(static_cast<int>(n));
    next += 2;
  }
  sys.macro_dof = next;
  const Eigen::Index m0 = sys.macro_dof;
  sys.pinned.assign(static_cast<std::size_t>(sys.size()), 0);
  sys.f = Eigen::VectorXd::Zero(sys.size());

  std::vector<Eigen::Triplet<double>> trip;
  std::size_t active = 0;
  for (const auto& d : sys.elements) active += !d.terms.empty();
  trip.reserve(active * (36 + 36 + 9));
  Mat3 K_macro = Mat3::Zero();
  Vec3 f_macro = Vec3::Zero();
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& d = sys.elements[e];
    if (d.terms.empty()) continue;
    const auto& c = contrib[e];
    std::array<int, 6> dof;
    for (int a = 0; a < 3; ++a) {
      const int base = sys.node_dof[mesh.master(d.nodes[a])];
      dof[2 * a] = base < 0 ? -1 : base;
      dof[2 * a + 1] = base < 0 ? -1 : base + 1;
    }
    for (int i = 0; i < 6; ++i) {
      if (dof[i] < 0) continue;
      sys.f[dof[i]] += c.f[i];
      for (int j = 0; j < 6; ++j)
        if (dof[j] >= 0) trip.emplace_back(dof[i], dof[j], c.K(i, j));
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(dof[i], m0 + j, c.K_coupling(i, j));
        trip.emplace_back(m0 + j, dof[i], c.K_coupling(i, j));
      }
    }
    K_macro += c.K_macro;
    f_macro += c.f_macro;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) trip.emplace_back(m0 + i, m0 + j, K_macro(i, j));
  sys.f.segment<3>(m0) = f_macro;
  if (load.kind == LoadKind::MacroStress)
    sys.f.segment<3>(m0) += load.value * sys.cell_size * sys.cell_size * load.thickness;

  sys.K.resize(sys.size(), sys.size());
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  return sys;
}

namespace {

int integer_rank(const std::vector<std::array<int, 2>>& vs) {
  bool any = false;
  std::array<int, 2> first{};
  for (const auto& v : vs) {
    if (v[0] == 0 && v[1] == 0) continue;
    if (!any) {
      any = true;
      first = v;
      continue;
    }
    if (static_cast<long long>(first[0]) * v[1] - static_cast<long long>(first[1]) * v[0] != 0)
      return 2;
  }
  return any ? 1 : 0;
}

}  // namespace

void pin_floating_components(LinearSystem& sys, const Mesh& mesh) {
  const double l = mesh.cell_size();
  const std::size_t nn = mesh.node_count();
  auto shift = [&](int node) -> std::array<int, 2> {
    const Vec2 d = (mesh.nodes()[node] - mesh.nodes()[mesh.master(node)]) / l;
    return {static_cast<int>(std::lround(d.x())), static_cast<int>(std::lround(d.y()))};
  };

  // Adjacency between active canonical nodes with the lattice offset of the
  // neighbour's copy relative to the node's copy inside the element.
  struct Link {
    int to;
    std::array<int, 2> off;
  };
  std::vector<std::vector<Link>> adj(nn);
  for (const auto& d : sys.elements) {
    if (d.terms.empty()) continue;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const int ma = mesh.master(d.nodes[a]);
        const int mb = mesh.master(d.nodes[b]);
        if (sys.node_dof[ma] < 0 || sys.node_dof[mb] < 0) continue;
        const auto sa = shift(d.nodes[a]);
        const auto sb = shift(d.nodes[b]);
        adj[ma].push_back({mb, {sb[0] - sa[0], sb[1] - sa[1]}});
      }
  }

  const Vec2 centre(0.5 * l, 0.5 * l);
  std::vector<int> comp(nn, -1);
  std::vector<std::array<int, 2>> k(nn, {0, 0});
  sys.components.clear();
  std::fill(sys.pinned.begin(), sys.pinned.end(), 0);

  for (int seed : sys.dof_node) {
    if (comp[seed] >= 0) continue;
    const int id = static_cast<int>(sys.components.size());
    Component c;
    std::vector<std::array<int, 2>> cycles;
    std::queue<int> todo;
    comp[seed] = id;
    k[seed] = {0, 0};
    todo.push(seed);
    while (!todo.empty()) {
      const int a = todo.front();
      todo.pop();
      c.nodes.push_back(a);
      for (const auto& link : adj[a]) {
        const std::array<int, 2> kb{k[a][0] + link.off[0], k[a][1] + link.off[1]};
        if (comp[link.to] < 0) {
          comp[link.to] = id;
          k[link.to] = kb;
          todo.push(link.to);
        } else if (kb != k[link.to]) {
          cycles.push_back({kb[0] - k[link.to][0], kb[1] - k[link.to][1]});
        }
      }
    }
    std::sort(c.nodes.begin(), c.nodes.end());
    c.wrap_rank = integer_rank(cycles);

    auto unwrapped = [&](int n) {
      return Vec2(mesh.nodes()[n].x() + k[n][0] * l, mesh.nodes()[n].y() + k[n][1] * l);
    };
    int anchor = c.nodes.front();
    double best = std::numeric_limits<double>::infinity();
    for (int n : c.nodes) {
      const double d = (mesh.nodes()[n] - centre).squaredNorm();
      if (d < best) {
        best = d;
        anchor = n;
      }
    }
    const Eigen::Index da = sys.node_dof[anchor];
    c.pinned = {da, da + 1};
    if (c.wrap_rank == 0 && c.nodes.size() > 1) {
      const Vec2 pa = unwrapped(anchor);
      int far = anchor;
      double far_d = -1.0;
      for (int n : c.nodes) {
        const double d = (unwrapped(n) - pa).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = n;
        }
      }
      const Vec2 ab = unwrapped(far) - pa;
      // Perpendicular to AB is (-ab.y, ab.x); pin its dominant axis.
      const int axis = std::abs(ab.y()) >= std::abs(ab.x()) ? 0 : 1;
      c.pinned.push_back(sys.node_dof[far] + axis);
    }
    for (auto dof : c.pinned) sys.pinned[dof] = 1;
    sys.components.push_back(std::move(c));
  }

  // The anchor is the component holding the active node nearest the centre.
  int anchor_comp = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int n : sys.dof_node) {
    const double d = (mesh.nodes()[n] - centre).squaredNorm();
    if (d < best) {
      best = d;
      anchor_comp = comp[n];
    }
  }
  if (anchor_comp >= 0) sys.components[anchor_comp].anchor = true;
  sys.floating_components = 0;
  for (const auto& c : sys.components)
    if (!c.anchor && c.wrap_rank == 0) ++sys.floating_components;
}

}  // namespace hygronet
