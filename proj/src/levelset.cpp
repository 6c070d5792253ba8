#include "hygronet/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hygronet {
namespace {

double local_distance(double c, double s, double half_l, double half_w, const Vec2& d) {
  const double dl = c * d.x() + s * d.y();
  const double dt = -s * d.x() + c * d.y();
  const double qx = std::abs(dl) - half_l;
  const double qy = std::abs(dt) - half_w;
  const double ox = std::max(qx, 0.0);
  const double oy = std::max(qy, 0.0);
  const double outside = std::sqrt(ox * ox + oy * oy);
  const double inside = std::min(std::max(qx, qy), 0.0);
  return -(outside + inside);
}

double wrap(double x, double l) {
  double r = std::fmod(x, l);
  if (r < 0.0) r += l;
  if (r >= l) r = 0.0;
  return r;
}

}  // namespace

double fibre_signed_distance(const Fibre& f, const Vec2& p) {
  return local_distance(std::cos(f.theta), std::sin(f.theta), 0.5 * f.length, 0.5 * f.width,
                        p - f.centroid);
}

std::array<Vec2, 9> image_shifts(double l) {
  std::array<Vec2, 9> out;
  int k = 0;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) out[k++] = Vec2(i * l, j * l);
  return out;
}

double periodic_signed_distance(const Fibre& f, const Vec2& p, double cell_size) {
  const double c = std::cos(f.theta);
  const double s = std::sin(f.theta);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& shift : image_shifts(cell_size))
    best = std::max(best, local_distance(c, s, 0.5 * f.length, 0.5 * f.width,
                                         p - f.centroid - shift));
  return best;
}

LevelSetSample network_levelset(const Network& net, const Vec2& p) {
  LevelSetSample out;
  out.psi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.fibres.size(); ++i) {
    const double phi = periodic_signed_distance(net.fibres[i], p, net.cell_size);
    out.psi = std::max(out.psi, phi);
    if (phi >= 0.0) out.members.push_back(static_cast<int>(i));
  }
  return out;
}

Box bounding_box(const Fibre& f) {
  const double hx = 0.5 * (f.length * std::abs(std::cos(f.theta)) +
                           f.width * std::abs(std::sin(f.theta)));
  const double hy = 0.5 * (f.length * std::abs(std::sin(f.theta)) +
                           f.width * std::abs(std::cos(f.theta)));
  return {f.centroid - Vec2(hx, hy), f.centroid + Vec2(hx, hy)};
}

Box bounding_box(const Triangle& t) {
  return {t[0].cwiseMin(t[1]).cwiseMin(t[2]), t[0].cwiseMax(t[1]).cwiseMax(t[2])};
}

FibreIndex::FibreIndex(const Network& network) : network_(&network) {
  const double l = network.cell_size;
  double max_len = 0.0;
  for (const auto& f : network.fibres) max_len = std::max(max_len, f.length);
  nb_ = max_len > 0.0 ? std::max(1, static_cast<int>(std::floor(l / (0.5 * max_len)))) : 1;
  nb_ = std::min(nb_, 512);
  bucket_ = l / nb_;
  buckets_.assign(static_cast<std::size_t>(nb_) * nb_, {});

  const auto shifts = image_shifts(l);
  image_boxes_.resize(network.fibres.size());
  for (std::size_t i = 0; i < network.fibres.size(); ++i) {
    const Box base = bounding_box(network.fibres[i]);
    for (int k = 0; k < 9; ++k) image_boxes_[i][k] = {base.lo + shifts[k], base.hi + shifts[k]};
    std::vector<int> touched;
    for (const Box& b : image_boxes_[i]) {
      if (b.hi.x() < 0.0 || b.lo.x() > l || b.hi.y() < 0.0 || b.lo.y() > l) continue;
      const int x0 = bucket_of(std::max(b.lo.x(), 0.0));
      const int x1 = bucket_of(std::min(b.hi.x(), l));
      const int y0 = bucket_of(std::max(b.lo.y(), 0.0));
      const int y1 = bucket_of(std::min(b.hi.y(), l));
      for (int ix = x0; ix <= x1; ++ix)
        for (int iy = y0; iy <= y1; ++iy) touched.push_back(iy * nb_ + ix);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int t : touched) buckets_[t].push_back(static_cast<int>(i));
  }
}

int FibreIndex::bucket_of(double coord) const {
  return std::clamp(static_cast<int>(std::floor(coord / bucket_)), 0, nb_ - 1);
}

std::span<const int> FibreIndex::bucket_candidates(const Vec2& p) const {
  const double l = network_->cell_size;
  const auto& b = buckets_[bucket_of(wrap(p.y(), l)) * nb_ + bucket_of(wrap(p.x(), l))];
  return {b.data(), b.size()};
}

std::vector<int> FibreIndex::candidates(const Box& box) const {
  const int x0 = bucket_of(box.lo.x());
  const int x1 = bucket_of(box.hi.x());
  const int y0 = bucket_of(box.lo.y());
  const int y1 = bucket_of(box.hi.y());
  std::vector<int> out;
  for (int iy = y0; iy <= y1; ++iy)
    for (int ix = x0; ix <= x1; ++ix) {
      const auto& b = buckets_[iy * nb_ + ix];
      out.insert(out.end(), b.begin(), b.end());
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](int i) {
    for (const Box& ib : image_boxes_[i])
      if (ib.overlaps(box)) return false;
    return true;
  });
  return out;
}

LevelSetSample FibreIndex::levelset(const Vec2& p) const {
  const double l = network_->cell_size;
  const Vec2 w(wrap(p.x(), l), wrap(p.y(), l));
  LevelSetSample out;
  out.psi = -std::numeric_limits<double>::infinity();
  for (int i : bucket_candidates(w)) {
    const double phi = periodic_signed_distance(network_->fibres[i], w, l);
    out.psi = std::max(out.psi, phi);
    if (phi >= 0.0) out.members.push_back(i);
  }
  return out;
}

FibreImages::FibreImages(const Fibre& fibre, double cell_size)
    : fibre_(&fibre), c_(std::cos(fibre.theta)), s_(std::sin(fibre.theta)) {
  for (const Vec2& shift : image_shifts(cell_size)) centres_[count_++] = fibre.centroid + shift;
}

FibreImages::FibreImages(const Fibre& fibre, double cell_size, const std::array<Box, 9>& boxes,
                         const Box& region)
    : fibre_(&fibre), c_(std::cos(fibre.theta)), s_(std::sin(fibre.theta)) {
  const auto shifts = image_shifts(cell_size);
  for (int k = 0; k < 9; ++k)
    if (boxes[k].overlaps(region)) centres_[count_++] = fibre.centroid + shifts[k];
}

double FibreImages::operator()(const Vec2& p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < count_; ++k)
    best = std::max(best, local_distance(c_, s_, 0.5 * fibre_->length, 0.5 * fibre_->width,
                                         p - centres_[k]));
  return best;
}

}  // namespace hygronet
