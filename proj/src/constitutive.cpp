#include "hygronet/constitutive.hpp"

#include <cmath>

namespace hygronet {

Mat3 local_stiffness(const Material& m) {
  const double det = 1.0 - m.nu_lt * m.nu_tl;
  Mat3 D;
  D << m.E_l / det, m.E_l * m.nu_tl / det, 0.0,
       m.E_t * m.nu_lt / det, m.E_t / det, 0.0,
       0.0, 0.0, m.G_lt;
  return D;
}

Mat3 strain_rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 T;
  T << c * c, s * s, c * s,
       s * s, c * c, -c * s,
       -2.0 * c * s, 2.0 * c * s, c * c - s * s;
  return T;
}

ConstitutiveGlobal constitutive_global(const Material& m, double theta) {
  const Mat3 T = strain_rotation(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ConstitutiveGlobal out;
  out.D = T.transpose() * local_stiffness(m) * T;
  // Strain-like quantity, so it rotates with T^-1.
  out.beta = Vec3(c * c * m.beta_l + s * s * m.beta_t, s * s * m.beta_l + c * c * m.beta_t,
                  2.0 * c * s * (m.beta_l - m.beta_t));
  return out;
}

}  // namespace hygronet
