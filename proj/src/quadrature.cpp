#include "hygronet/quadrature.hpp"

#include "hygronet/parallel.hpp"

namespace hygronet {

int leaf_depth(double tol_frac) {
  if (!(tol_frac > 0.0 && tol_frac <= 1.0))
    throw InputDomainError("quadrature: tol_frac must lie in (0, 1]");
  int depth = 0;
  double size = 1.0;
  while (size > tol_frac * (1.0 + 1e-12) && depth < 40) {
    size *= 0.5;
    ++depth;
  }
  return depth;
}

double fibre_area_in_triangle(const Fibre& fibre, const Triangle& tri, double tol_frac) {
  const double c = std::cos(fibre.theta);
  const double s = std::sin(fibre.theta);
  const auto phi = [&](const Vec2& p) {
    const Vec2 d = p - fibre.centroid;
    const double qx = std::abs(c * d.x() + s * d.y()) - 0.5 * fibre.length;
    const double qy = std::abs(-s * d.x() + c * d.y()) - 0.5 * fibre.width;
    return -(Vec2(std::max(qx, 0.0), std::max(qy, 0.0)).norm() + std::min(std::max(qx, qy), 0.0));
  };
  return subtriangulated_area(phi, tri, tol_frac);
}

double fibre_area_in_triangle(const Fibre& fibre, const Triangle& tri, double tol_frac,
                              double cell_size) {
  const FibreImages phi(fibre, cell_size);
  return subtriangulated_area(phi, tri, tol_frac);
}

double ElementCoverage::total_area() const {
  double sum = 0.0;
  for (const auto& row : entries)
    for (const auto& fa : row) sum += fa.area;
  return sum;
}

double ElementCoverage::fibre_area(int fibre) const {
  double sum = 0.0;
  for (const auto& row : entries)
    for (const auto& fa : row)
      if (fa.fibre == fibre) sum += fa.area;
  return sum;
}

std::size_t ElementCoverage::covered_elements() const {
  std::size_t n = 0;
  for (const auto& row : entries) n += !row.empty();
  return n;
}

ElementCoverage element_coverage(const Mesh& mesh, const FibreIndex& index,
                                 const CoverageOptions& options) {
  const int depth = leaf_depth(options.tol_frac);
  const Network& net = index.network();
  ElementCoverage out;
  out.tol_frac = options.tol_frac;
  out.mode = options.mode;
  out.entries.resize(mesh.element_count());
  std::vector<QuadratureStats> stats(mesh.element_count());

  parallel_for(mesh.element_count(), [&](std::size_t e) {
    const Triangle t = mesh.triangle(static_cast<int>(e));
    const double area = signed_area(t);
    const Box box = bounding_box(t);
    const Vec2 g = centroid(t);
    for (int i : index.candidates(box)) {
      const FibreImages phi(net.fibres[i], net.cell_size, index.image_boxes(i), box);
      double a = 0.0;
      if (options.mode == CoverageMode::CentroidMembership) {
        a = phi(g) >= 0.0 ? area : 0.0;
      } else {
        ++stats[e].calls;
        a = detail::subdivide(phi, t[0], t[1], t[2], phi(t[0]), phi(t[1]), phi(t[2]), 0, depth,
                              stats[e]);
      }
      if (a > options.sliver_frac * area) out.entries[e].push_back({i, a});
    }
  });
  for (const auto& s : stats) out.stats += s;
  return out;
}

}  // namespace hygronet
