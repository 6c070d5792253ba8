#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>

namespace hygronet {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Three vertices, counter-clockwise.
using Triangle = std::array<Vec2, 3>;

inline double signed_area(const Triangle& t) {
  return 0.5 * ((t[1].x() - t[0].x()) * (t[2].y() - t[0].y()) -
                (t[2].x() - t[0].x()) * (t[1].y() - t[0].y()));
}

inline Vec2 centroid(const Triangle& t) { return (t[0] + t[1] + t[2]) / 3.0; }

/// Precondition violated by a caller-supplied value.
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A data structure invariant was broken during an algorithm.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The reduced stiffness cannot be factorized or the load is not carried.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, long dof)
      : std::runtime_error(what), dof_(dof) {}
  long dof() const { return dof_; }

 private:
  long dof_;
};

/// The fibre structure cannot transmit a macroscopic strain.
class DisconnectedStructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hygronet
