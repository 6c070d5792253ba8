#include "hygronet/mesh.hpp"

#include "hygronet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hygronet {
namespace {

constexpr int kMaxLeppLength = 100000;

}  // namespace

std::size_t Mesh::EdgeKeyHash::operator()(const EdgeKey& k) const {
  std::size_t h = static_cast<std::size_t>(k.a) * 0x9E3779B97F4A7C15ull;
  h ^= static_cast<std::size_t>(k.b) + 0x7F4A7C15ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::size_t>((k.kx + 2) * 5 + (k.ky + 2)) + (h << 6) + (h >> 2);
  return h;
}

Mesh Mesh::from_triangles(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles) {
  Mesh m;
  m.nodes_ = std::move(nodes);
  m.master_.resize(m.nodes_.size());
  for (std::size_t i = 0; i < m.master_.size(); ++i) m.master_[i] = static_cast<int>(i);
  m.elements_.reserve(triangles.size());
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    auto t = triangles[e];
    for (int v : t)
      if (v < 0 || static_cast<std::size_t>(v) >= m.nodes_.size())
        throw InputDomainError("mesh: node index out of range");
    const double a = signed_area({m.nodes_[t[0]], m.nodes_[t[1]], m.nodes_[t[2]]});
    if (a == 0.0) throw InputDomainError("mesh: degenerate triangle " + std::to_string(e));
    if (a < 0.0) std::swap(t[1], t[2]);
    m.elements_.push_back({t, 0, static_cast<int>(e)});
  }
  for (std::size_t e = 0; e < m.elements_.size(); ++e) m.attach(static_cast<int>(e));
  return m;
}

Mesh Mesh::periodic_grid(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3 || ys.size() < 3)
    throw InputDomainError("mesh: a periodic grid needs at least two divisions per side");
  if (xs.front() != 0.0 || ys.front() != 0.0 || xs.back() != ys.back())
    throw InputDomainError("mesh: grid lines must span [0, l] in both directions");
  for (const auto* g : {&xs, &ys})
    for (std::size_t i = 1; i < g->size(); ++i)
      if (!((*g)[i] > (*g)[i - 1])) throw InputDomainError("mesh: grid lines must increase");

  Mesh m;
  m.periodic_ = true;
  m.cell_size_ = xs.back();
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  m.nodes_.reserve(static_cast<std::size_t>(nx) * ny);
  m.master_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.nodes_.emplace_back(xs[i], ys[j]);
      const int mi = i == nx - 1 ? 0 : i;
      const int mj = j == ny - 1 ? 0 : j;
      m.master_.push_back(mj * nx + mi);
    }
  m.elements_.reserve(2 * static_cast<std::size_t>(nx - 1) * (ny - 1));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int ll = j * nx + i;
      const int lr = ll + 1;
      const int ul = ll + nx;
      const int ur = ul + 1;
      const int id = static_cast<int>(m.elements_.size());
      m.elements_.push_back({{ll, lr, ur}, 0, id});
      m.elements_.push_back({{ll, ur, ul}, 0, id + 1});
    }
  m.edges_.reserve(m.elements_.size() * 2);
  for (std::size_t e = 0; e < m.elements_.size(); ++e) m.attach(static_cast<int>(e));
  return m;
}

Triangle Mesh::triangle(int e) const {
  const auto& v = elements_[e].v;
  return {nodes_[v[0]], nodes_[v[1]], nodes_[v[2]]};
}

std::size_t Mesh::canonical_node_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < master_.size(); ++i) n += master_[i] == static_cast<int>(i);
  return n;
}

std::vector<PeriodicPair> Mesh::periodic_pairs() const {
  std::vector<PeriodicPair> out;
  for (std::size_t i = 0; i < master_.size(); ++i)
    if (master_[i] != static_cast<int>(i)) out.push_back({master_[i], static_cast<int>(i)});
  return out;
}

std::array<int, 2> Mesh::lattice_shift(int node) const {
  if (!periodic_) return {0, 0};
  const Vec2 d = (nodes_[node] - nodes_[master_[node]]) / cell_size_;
  return {static_cast<int>(std::lround(d.x())), static_cast<int>(std::lround(d.y()))};
}

Mesh::EdgeKey Mesh::edge_key(int e, int k) const {
  const auto& v = elements_[e].v;
  int p = v[k];
  int q = v[(k + 1) % 3];
  if (master_[p] > master_[q]) std::swap(p, q);
  const auto sp = lattice_shift(p);
  const auto sq = lattice_shift(q);
  return {master_[p], master_[q], sq[0] - sp[0], sq[1] - sp[1]};
}

void Mesh::attach(int e) {
  for (int k = 0; k < 3; ++k) {
    auto& slots = edges_[edge_key(e, k)];
    if (slots.count >= 2)
      throw InternalConsistencyError("mesh: edge with more than two incident elements at element " +
                                     std::to_string(e));
    slots.s[slots.count++] = {e, k};
  }
}

void Mesh::detach(int e) {
  for (int k = 0; k < 3; ++k) {
    auto it = edges_.find(edge_key(e, k));
    if (it == edges_.end()) throw InternalConsistencyError("mesh: missing edge on detach");
    auto& slots = it->second;
    if (slots.count == 2 && slots.s[0].element == e) slots.s[0] = slots.s[1];
    else if (slots.s[0].element != e && (slots.count < 2 || slots.s[1].element != e))
      throw InternalConsistencyError("mesh: edge slot mismatch on detach");
    if (--slots.count == 0) edges_.erase(it);
  }
}

std::optional<Mesh::Neighbour> Mesh::neighbour(int e, int k) const {
  auto it = edges_.find(edge_key(e, k));
  if (it == edges_.end()) return std::nullopt;
  const auto& slots = it->second;
  for (int i = 0; i < slots.count; ++i)
    if (slots.s[i].element != e) return slots.s[i];
  return std::nullopt;
}

double Mesh::edge_length_sq(int e, int k) const {
  const auto& v = elements_[e].v;
  return (nodes_[v[(k + 1) % 3]] - nodes_[v[k]]).squaredNorm();
}

int Mesh::longest_edge(int e) const {
  const auto& v = elements_[e].v;
  int best = 0;
  double best_len = edge_length_sq(e, 0);
  for (int k = 1; k < 3; ++k) {
    const double len = edge_length_sq(e, k);
    // Relative tolerance so that mirror-image triangles break ties the same way.
    const double tol = 1e-12 * std::max(len, best_len);
    const bool longer = len > best_len + tol;
    const bool tie = std::abs(len - best_len) <= tol;
    if (longer || (tie && master_[v[(k + 2) % 3]] < master_[v[(best + 2) % 3]])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

std::vector<int> Mesh::lepp(int e) const {
  std::vector<int> path{e};
  int cur = e;
  for (int guard = 0; guard < kMaxLeppLength; ++guard) {
    const int k = longest_edge(cur);
    const auto n = neighbour(cur, k);
    if (!n) return path;
    path.push_back(n->element);
    if (longest_edge(n->element) == n->edge) return path;
    cur = n->element;
  }
  throw InternalConsistencyError("mesh: longest edge propagation path does not terminate");
}

double Mesh::min_angle() const {
  double best = std::numbers::pi;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Triangle t = triangle(static_cast<int>(e));
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = t[(k + 1) % 3] - t[k];
      const Vec2 b = t[(k + 2) % 3] - t[k];
      const double ang = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
      best = std::min(best, ang);
    }
  }
  return best;
}

int Mesh::add_node(const Vec2& x, int master) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(x);
  master_.push_back(master < 0 ? id : master);
  return id;
}

void Mesh::split(int e, int k, int mid) {
  detach(e);
  const Element old = elements_[e];
  const int a = old.v[k];
  const int b = old.v[(k + 1) % 3];
  const int c = old.v[(k + 2) % 3];
  elements_[e] = {{a, mid, c}, old.generation + 1, old.root};
  elements_.push_back({{mid, b, c}, old.generation + 1, old.root});
  attach(e);
  attach(static_cast<int>(elements_.size()) - 1);
}

void Mesh::record(std::initializer_list<int> split_elements) {
  BisectionStep step;
  for (int e : split_elements) {
    step.elements.push_back(e);
    step.roots.push_back(elements_[e].root);
  }
  history_.push_back(std::move(step));
}

void Mesh::bisect_single(int e, int k) {
  record({e});
  const auto& v = elements_[e].v;
  const int mid = add_node(0.5 * (nodes_[v[k]] + nodes_[v[(k + 1) % 3]]), -1);
  split(e, k, mid);
}

void Mesh::bisect_pair(int e, int k, int f, int kf) {
  record({e, f});
  const auto& ve = elements_[e].v;
  const auto& vf = elements_[f].v;
  const Vec2 me = 0.5 * (nodes_[ve[k]] + nodes_[ve[(k + 1) % 3]]);
  const Vec2 mf = 0.5 * (nodes_[vf[kf]] + nodes_[vf[(kf + 1) % 3]]);
  const double scale = periodic_ ? cell_size_ : 1.0;
  int mid_e;
  int mid_f;
  if ((me - mf).norm() <= 1e-12 * scale) {
    mid_e = mid_f = add_node(me, -1);
  } else {
    // The shared edge lies on a periodic seam. The copy with the smaller
    // coordinates is the master.
    const bool e_first = me.x() + me.y() < mf.x() + mf.y();
    const int master = add_node(e_first ? me : mf, -1);
    const int image = add_node(e_first ? mf : me, master);
    mid_e = e_first ? master : image;
    mid_f = e_first ? image : master;
  }
  split(e, k, mid_e);
  split(f, kf, mid_f);
}

std::size_t Mesh::refine_element(int e) {
  if (e < 0 || static_cast<std::size_t>(e) >= elements_.size())
    throw InputDomainError("mesh: element id out of range");
  const int start_gen = elements_[e].generation;
  std::size_t split_count = 0;
  for (int guard = 0; elements_[e].generation == start_gen; ++guard) {
    if (guard > kMaxLeppLength)
      throw InternalConsistencyError("mesh: refinement of element " + std::to_string(e) +
                                     " does not terminate");
    const auto path = lepp(e);
    const int t = path.back();
    const int k = longest_edge(t);
    const auto n = neighbour(t, k);
    if (!n) {
      bisect_single(t, k);
      split_count += 1;
    } else {
      bisect_pair(t, k, n->element, n->edge);
      split_count += 2;
    }
  }
  return split_count;
}

void Mesh::check_invariants() const {
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& v = elements_[e].v;
    for (int x : v)
      if (x < 0 || static_cast<std::size_t>(x) >= nodes_.size())
        throw InternalConsistencyError("mesh: element " + std::to_string(e) + " has a bad node");
    if (!(area(static_cast<int>(e)) > 0.0))
      throw InternalConsistencyError("mesh: element " + std::to_string(e) + " is inverted");
  }

  std::unordered_map<EdgeKey, int, EdgeKeyHash> fresh;
  for (std::size_t e = 0; e < elements_.size(); ++e)
    for (int k = 0; k < 3; ++k) {
      const int c = ++fresh[edge_key(static_cast<int>(e), k)];
      if (c > 2)
        throw InternalConsistencyError("mesh: edge with more than two incident elements");
    }
  if (fresh.size() != edges_.size())
    throw InternalConsistencyError("mesh: edge table out of date");
  for (const auto& [key, count] : fresh) {
    auto it = edges_.find(key);
    if (it == edges_.end() || it->second.count != count)
      throw InternalConsistencyError("mesh: edge table out of date");
  }

  if (periodic_) {
    for (const auto& [key, count] : fresh)
      if (count != 2)
        throw InternalConsistencyError("mesh: unmatched edge in a periodic mesh (hanging node)");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int m = master_[i];
      if (master_[m] != m) throw InternalConsistencyError("mesh: master of a master differs");
      const Vec2 d = nodes_[i] - nodes_[m];
      for (int c = 0; c < 2; ++c) {
        const double r = d[c] / cell_size_;
        if (std::abs(r - std::round(r)) > 1e-9 || std::round(r) < 0.0 || std::round(r) > 1.0)
          throw InternalConsistencyError("mesh: periodic image " + std::to_string(i) +
                                         " is not a lattice translate of its master");
      }
      if (m != static_cast<int>(i) && d.norm() < 1e-9 * cell_size_)
        throw InternalConsistencyError("mesh: duplicate node " + std::to_string(i));
    }
    double total = 0.0;
    for (std::size_t e = 0; e < elements_.size(); ++e) total += area(static_cast<int>(e));
    if (std::abs(total - cell_size_ * cell_size_) > 1e-9 * cell_size_ * cell_size_)
      throw InternalConsistencyError("mesh: elements do not tile the cell");
    return;
  }

  // Non-periodic: a boundary edge whose midpoint is a node of another
  // boundary edge means one side was split and the other was not.
  std::unordered_map<long long, std::vector<int>> boundary_nodes;
  auto cell_key = [](const Vec2& x) {
    const long long ix = std::llround(x.x() * 1e9);
    const long long iy = std::llround(x.y() * 1e9);
    return ix * 1000003LL + iy;
  };
  std::vector<std::pair<int, int>> boundary_edges;
  for (std::size_t e = 0; e < elements_.size(); ++e)
    for (int k = 0; k < 3; ++k)
      if (fresh[edge_key(static_cast<int>(e), k)] == 1) {
        const int a = elements_[e].v[k];
        const int b = elements_[e].v[(k + 1) % 3];
        boundary_edges.emplace_back(a, b);
        boundary_nodes[cell_key(nodes_[a])].push_back(a);
        boundary_nodes[cell_key(nodes_[b])].push_back(b);
      }
  for (const auto& [a, b] : boundary_edges) {
    const Vec2 mid = 0.5 * (nodes_[a] + nodes_[b]);
    auto it = boundary_nodes.find(cell_key(mid));
    if (it == boundary_nodes.end()) continue;
    for (int n : it->second)
      if ((nodes_[n] - mid).norm() < 1e-9 * (nodes_[a] - nodes_[b]).norm())
        throw InternalConsistencyError("mesh: hanging node " + std::to_string(n));
  }
}

Mesh build_structured_mesh(double cell_size, int n_div) {
  if (!(cell_size > 0.0)) throw InputDomainError("mesh: cell size must be positive");
  if (n_div < 2) throw InputDomainError("mesh: n_div must be at least 2");
  std::vector<double> xs(n_div + 1);
  for (int i = 0; i <= n_div; ++i) xs[i] = cell_size * i / n_div;
  xs.back() = cell_size;
  return Mesh::periodic_grid(xs, xs);
}

std::vector<ElementClass> classify_elements(const Mesh& mesh, const FibreIndex& index) {
  const Network& net = index.network();
  std::vector<ElementClass> out(mesh.element_count());
  parallel_for(mesh.element_count(), [&](std::size_t e) {
    const Triangle t = mesh.triangle(static_cast<int>(e));
    const Box box = bounding_box(t);
    ElementClass& cls = out[e];
    cls.candidates = index.candidates(box);
    bool interface = false;
    bool interior = false;
    const Vec2 g = centroid(t);
    for (int i : cls.candidates) {
      const FibreImages phi(net.fibres[i], net.cell_size, index.image_boxes(i), box);
      int inside = 0;
      for (const Vec2& x : t) inside += phi(x) >= 0.0;
      if (inside == 3) {
        interior = true;
      } else if (inside > 0 || phi(g) >= 0.0) {
        interface = true;
        break;
      }
    }
    cls.kind = interface ? ElementKind::Interface
                         : (interior ? ElementKind::Interior : ElementKind::Void);
  });
  return out;
}

void refine_lepp(Mesh& mesh, std::span<const int> marked) {
  std::vector<int> generation(marked.size());
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (marked[i] < 0 || static_cast<std::size_t>(marked[i]) >= mesh.element_count())
      throw InputDomainError("refine: element id out of range");
    generation[i] = mesh.elements()[marked[i]].generation;
  }
  for (std::size_t i = 0; i < marked.size(); ++i)
    if (mesh.elements()[marked[i]].generation == generation[i]) mesh.refine_element(marked[i]);
}

void refine_to_interface(Mesh& mesh, const FibreIndex& index, int levels, int generation_cap) {
  if (levels < 0) throw InputDomainError("refine: levels must be non-negative");
  for (int level = 0; level < levels; ++level) {
    const auto cls = classify_elements(mesh, index);
    std::vector<int> marked;
    for (std::size_t e = 0; e < cls.size(); ++e)
      if (cls[e].kind == ElementKind::Interface && mesh.elements()[e].generation < generation_cap)
        marked.push_back(static_cast<int>(e));
    if (marked.empty()) break;
    refine_lepp(mesh, marked);
  }
}

}  // namespace hygronet
