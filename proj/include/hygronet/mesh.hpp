#pragma once

#include "hygronet/levelset.hpp"
#include "hygronet/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace hygronet {

struct Element {
  std::array<int, 3> v{};  ///< counter-clockwise node ids
  int generation = 0;      ///< number of bisections since the initial mesh
  int root = -1;           ///< ancestor element id in the initial mesh
};

/// A node on the left/bottom boundary and one of its images on the
/// right/top boundary (image = master + shift, shift in {l, 0}^2 \ 0).
struct PeriodicPair {
  int master = -1;
  int image = -1;
};

/// One LEPP terminal operation: either a single boundary triangle or the
/// pair sharing a longest edge.
struct BisectionStep {
  std::vector<int> elements;
  std::vector<int> roots;
};

/// Conforming triangulation with edge adjacency. In a periodic mesh the
/// opposite boundaries are glued: nodes on x = l (y = l) are images of
/// nodes on x = 0 (y = 0) and triangles across the seam are neighbours.
class Mesh {
 public:
  struct Neighbour {
    int element;
    int edge;
  };

  Mesh() = default;

  /// Non-periodic mesh from raw data. Triangles are reoriented CCW.
  static Mesh from_triangles(std::vector<Vec2> nodes,
                             std::vector<std::array<int, 3>> triangles);

  /// Periodic tensor-product grid with nodes at xs[i], ys[j]; both arrays
  /// start at 0 and end at the cell size. Each cell is split along the
  /// diagonal from its lower-left to its upper-right corner.
  static Mesh periodic_grid(const std::vector<double>& xs, const std::vector<double>& ys);

  bool periodic() const { return periodic_; }
  double cell_size() const { return cell_size_; }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t element_count() const { return elements_.size(); }

  Triangle triangle(int e) const;
  double area(int e) const { return signed_area(triangle(e)); }

  /// Canonical representative of a node under periodic identification.
  int master(int node) const { return master_[node]; }
  std::size_t canonical_node_count() const;
  std::vector<PeriodicPair> periodic_pairs() const;

  /// Edge k joins v[k] and v[(k+1)%3].
  std::optional<Neighbour> neighbour(int e, int k) const;
  double edge_length_sq(int e, int k) const;

  /// Local index of the longest edge; ties go to the edge whose opposite
  /// vertex has the lowest node id.
  int longest_edge(int e) const;

  /// Longest edge propagation path starting at e.
  std::vector<int> lepp(int e) const;

  const std::vector<BisectionStep>& history() const { return history_; }

  /// Smallest interior angle over all elements, radians.
  double min_angle() const;

  /// Throws InternalConsistencyError if an element is inverted, an edge has
  /// more than two incident elements, an interior edge is unmatched (hanging
  /// node), or periodic images do not match their masters under translation.
  void check_invariants() const;

  /// Bisects e (and its neighbour, for a shared longest edge) until e itself
  /// has been split. Returns the number of triangles split.
  std::size_t refine_element(int e);

 private:
  struct EdgeKey {
    int a;
    int b;
    int kx;
    int ky;
    bool operator==(const EdgeKey&) const = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const;
  };
  struct EdgeSlots {
    std::array<Neighbour, 2> s{{{-1, -1}, {-1, -1}}};
    int count = 0;
  };

  EdgeKey edge_key(int e, int k) const;
  void attach(int e);
  void detach(int e);
  int add_node(const Vec2& x, int master);
  std::array<int, 2> lattice_shift(int node) const;
  void split(int e, int k, int mid);
  void record(std::initializer_list<int> split_elements);
  void bisect_single(int e, int k);
  void bisect_pair(int e, int k, int f, int kf);

  std::vector<Vec2> nodes_;
  std::vector<int> master_;
  std::vector<Element> elements_;
  std::unordered_map<EdgeKey, EdgeSlots, EdgeKeyHash> edges_;
  std::vector<BisectionStep> history_;
  double cell_size_ = 0.0;
  bool periodic_ = false;
};

/// (n_div + 1)^2 nodes and 2 n_div^2 right triangles on [0, l]^2.
Mesh build_structured_mesh(double cell_size, int n_div);

enum class ElementKind { Void, Interior, Interface };

struct ElementClass {
  ElementKind kind = ElementKind::Void;
  std::vector<int> candidates;
};

/// Vertex and centroid signs per candidate fibre:
///   Interface - some fibre has vertices of both signs, or all vertices
///               outside but the centroid inside;
///   Interior  - no fibre is mixed and at least one contains all vertices;
///   Void      - every candidate is negative at the vertices and centroid.
std::vector<ElementClass> classify_elements(const Mesh& mesh, const FibreIndex& index);

/// Rivara backward longest-edge bisection of every marked element.
/// Ids that have already been split by an earlier propagation are skipped.
void refine_lepp(Mesh& mesh, std::span<const int> marked);

/// Repeats `levels` times: classify, mark interface elements below the
/// generation cap, refine.
void refine_to_interface(Mesh& mesh, const FibreIndex& index, int levels,
                         int generation_cap = 12);

}  // namespace hygronet
