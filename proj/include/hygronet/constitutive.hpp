#pragma once

#include "hygronet/netgen.hpp"

namespace hygronet {

/// Plane-stress law of one fibre in the global frame. Voigt order
/// (xx, yy, xy) with engineering shear strain.
struct ConstitutiveGlobal {
  Mat3 D = Mat3::Zero();
  Vec3 beta = Vec3::Zero();
};

/// Stiffness in the fibre frame (l, t).
Mat3 local_stiffness(const Material& material);

/// Maps global engineering strain to the fibre frame rotated by theta.
Mat3 strain_rotation(double theta);

/// D_g = T^T D_local T and the expansivity (beta_l, beta_t, 0) rotated back
/// into the global frame.
ConstitutiveGlobal constitutive_global(const Material& material, double theta);

}  // namespace hygronet
