#pragma once

#include "hygronet/netgen.hpp"

#include <span>
#include <vector>

namespace hygronet {

/// Exact signed distance to the fibre rectangle: positive inside, negative
/// outside, zero on the boundary.
double fibre_signed_distance(const Fibre& fibre, const Vec2& point);

/// Lattice offsets {-l, 0, l}^2 of the nine periodic images.
std::array<Vec2, 9> image_shifts(double cell_size);

/// Maximum of fibre_signed_distance over the nine periodic images.
double periodic_signed_distance(const Fibre& fibre, const Vec2& point,
                                double cell_size);

struct LevelSetSample {
  double psi = 0.0;           ///< max over all fibres
  std::vector<int> members;   ///< fibres with phi >= 0, ascending
};

/// Brute-force evaluation over every fibre.
LevelSetSample network_levelset(const Network& network, const Vec2& point);

/// Axis-aligned bounding box.
struct Box {
  Vec2 lo;
  Vec2 hi;
  bool overlaps(const Box& o) const {
    return lo.x() <= o.hi.x() && o.lo.x() <= hi.x() && lo.y() <= o.hi.y() &&
           o.lo.y() <= hi.y();
  }
};

Box bounding_box(const Fibre& fibre);
Box bounding_box(const Triangle& tri);

/// Uniform bucket grid over the cell. Each bucket lists every fibre that has
/// a periodic image whose bounding box touches the bucket.
class FibreIndex {
 public:
  explicit FibreIndex(const Network& network);

  const Network& network() const { return *network_; }
  double bucket_size() const { return bucket_; }
  int buckets_per_side() const { return nb_; }

  std::span<const int> bucket_candidates(const Vec2& point) const;

  /// Fibres with an image whose bounding box overlaps the box, ascending.
  std::vector<int> candidates(const Box& box) const;

  /// Same members as network_levelset. psi is exact whenever it is >= 0 and
  /// a lower bound otherwise (-inf when no candidate reaches the point).
  LevelSetSample levelset(const Vec2& point) const;

  /// Bounding boxes of the nine images of fibre i, in image_shifts order.
  const std::array<Box, 9>& image_boxes(int fibre) const { return image_boxes_[fibre]; }

 private:
  int bucket_of(double coord) const;

  const Network* network_;
  double bucket_ = 1.0;
  int nb_ = 1;
  std::vector<std::vector<int>> buckets_;
  std::vector<std::array<Box, 9>> image_boxes_;
};

/// Level set of a single fibre restricted to a subset of its periodic
/// images. Used by the quadrature, which only needs the images that can
/// reach a given element.
class FibreImages {
 public:
  FibreImages(const Fibre& fibre, double cell_size);
  FibreImages(const Fibre& fibre, double cell_size, const std::array<Box, 9>& boxes,
              const Box& region);

  bool empty() const { return count_ == 0; }
  int count() const { return count_; }
  double operator()(const Vec2& p) const;

 private:
  const Fibre* fibre_;
  double c_ = 1.0;
  double s_ = 0.0;
  std::array<Vec2, 9> centres_{};
  int count_ = 0;
};

}  // namespace hygronet
