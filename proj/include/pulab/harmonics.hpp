#pragma once

// Real orthonormal spherical harmonics on S^2.

#include "pulab/core.hpp"

namespace pulab {

// Y_lm in the real convention, orthonormal with respect to the round area
// element: integral of Y_lm^2 over S^2 equals 1.
inline double real_sph_harmonic(int l, int m, const Vec3& x) {
  if (l < 0 || std::abs(m) > l) throw InvariantError("real_sph_harmonic: bad (l, m)");
  const int am = std::abs(m);
  const double z = std::clamp(x.z() / x.norm(), -1.0, 1.0);
  double ratio = 1.0;  // (l - |m|)! / (l + |m|)!
  for (int k = l - am + 1; k <= l + am; ++k) ratio /= k;
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
  const double p = std::assoc_legendre(l, am, z);
  if (m == 0) return norm * p;
  const double phi = std::atan2(x.y(), x.x());
  const double angular = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
  return std::sqrt(2.0) * norm * p * angular;
}

}  // namespace pulab
