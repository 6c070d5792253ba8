#pragma once

#include "hygronet/levelset.hpp"
#include "hygronet/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hygronet {

struct QuadratureStats {
  std::size_t calls = 0;      ///< (element, fibre) pairs that needed recursion
  std::size_t triangles = 0;  ///< sub-triangles visited
  std::size_t leaves = 0;     ///< sub-triangles decided by the centroid rule

  QuadratureStats& operator+=(const QuadratureStats& o) {
    calls += o.calls;
    triangles += o.triangles;
    leaves += o.leaves;
    return *this;
  }
};

/// Smallest depth D with 2^-D <= tol_frac; sub-triangles at depth D are
/// leaves. tol_frac = 1/1024 gives ten bisection generations.
int leaf_depth(double tol_frac);

namespace detail {

template <class LevelSet>
double subdivide(const LevelSet& phi, const Vec2& a, const Vec2& b, const Vec2& c,
                 double pa, double pb, double pc, int depth, int max_depth,
                 QuadratureStats& stats) {
  ++stats.triangles;
  const double area = signed_area({a, b, c});
  if (pa >= 0.0 && pb >= 0.0 && pc >= 0.0) return area;

  const Vec2 g = (a + b + c) / 3.0;
  const double pg = phi(g);
  if (pa < 0.0 && pb < 0.0 && pc < 0.0 && pg < 0.0) {
    // phi is 1-Lipschitz, so the triangle is clear of the fibre when the
    // centroid is farther from it than from every vertex.
    const double reach = std::sqrt(std::max({(a - g).squaredNorm(), (b - g).squaredNorm(),
                                             (c - g).squaredNorm()}));
    if (pg < -reach) return 0.0;
  }
  if (depth >= max_depth) {
    ++stats.leaves;
    return pg >= 0.0 ? area : 0.0;
  }

  const double lab = (b - a).squaredNorm();
  const double lbc = (c - b).squaredNorm();
  const double lca = (a - c).squaredNorm();
  if (lab >= lbc && lab >= lca) {
    const Vec2 m = 0.5 * (a + b);
    const double pm = phi(m);
    return subdivide(phi, a, m, c, pa, pm, pc, depth + 1, max_depth, stats) +
           subdivide(phi, m, b, c, pm, pb, pc, depth + 1, max_depth, stats);
  }
  if (lbc >= lca) {
    const Vec2 m = 0.5 * (b + c);
    const double pm = phi(m);
    return subdivide(phi, b, m, a, pb, pm, pa, depth + 1, max_depth, stats) +
           subdivide(phi, m, c, a, pm, pc, pa, depth + 1, max_depth, stats);
  }
  const Vec2 m = 0.5 * (c + a);
  const double pm = phi(m);
  return subdivide(phi, c, m, b, pc, pm, pb, depth + 1, max_depth, stats) +
         subdivide(phi, m, a, b, pm, pa, pb, depth + 1, max_depth, stats);
}

}  // namespace detail

/// Area of {phi >= 0} inside a CCW triangle by recursive longest-edge
/// bisection. A sub-triangle with all vertices inside counts fully; one that
/// is provably outside counts zero; otherwise it is split, down to leaf
/// depth, where it counts fully iff its centroid is inside.
template <class LevelSet>
double subtriangulated_area(const LevelSet& phi, const Triangle& tri, double tol_frac,
                            QuadratureStats* stats = nullptr) {
  const double area = signed_area(tri);
  if (!(area > 0.0)) throw InputDomainError("subtriangulated_area: triangle area must be positive");
  const int depth = leaf_depth(tol_frac);
  QuadratureStats local;
  const double result = detail::subdivide(phi, tri[0], tri[1], tri[2], phi(tri[0]), phi(tri[1]),
                                          phi(tri[2]), 0, depth, local);
  if (stats) *stats += local;
  return result;
}

/// Non-periodic fibre.
double fibre_area_in_triangle(const Fibre& fibre, const Triangle& tri, double tol_frac);

/// Fibre repeated with the cell period.
double fibre_area_in_triangle(const Fibre& fibre, const Triangle& tri, double tol_frac,
                              double cell_size);

struct FibreArea {
  int fibre = -1;
  double area = 0.0;
};

enum class CoverageMode {
  SubTriangulation,    ///< recursive bisection quadrature
  CentroidMembership,  ///< classical non-conforming FEM: full element iff centroid inside
};

struct CoverageOptions {
  double tol_frac = 1.0 / 1024.0;
  CoverageMode mode = CoverageMode::SubTriangulation;
  /// Entries below sliver_frac * A_e are dropped.
  double sliver_frac = 1e-8;
};

struct ElementCoverage {
  std::vector<std::vector<FibreArea>> entries;  ///< per element, ascending fibre id
  double tol_frac = 1.0 / 1024.0;
  CoverageMode mode = CoverageMode::SubTriangulation;
  QuadratureStats stats;

  double total_area() const;
  double fibre_area(int fibre) const;
  std::size_t covered_elements() const;
};

ElementCoverage element_coverage(const Mesh& mesh, const FibreIndex& index,
                                 const CoverageOptions& options = {});

}  // namespace hygronet
