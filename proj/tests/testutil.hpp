#pragma once

// Shared independent oracles for the test suites. These deliberately avoid
// the library's own computational paths.

#include <cmath>
#include <functional>
#include <vector>

#include "pulab/core.hpp"

namespace testutil {

using pulab::Vec3;

// Surface area of an ellipsoid with semi-axes (a, b, c) by dense Simpson
// quadrature of the parametric area integral.
inline double ellipsoid_area_quadrature(double a, double b, double c, int n = 2048) {
  auto integrand = [&](double theta, double phi) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double gx = b * c * st * cp;
    const double gy = a * c * st * sp;
    const double gz = a * b * ct;
    return st * std::sqrt(gx * gx + gy * gy + gz * gz);
  };
  // Simpson in theta, trapezoid (periodic, spectrally accurate) in phi.
  double total = 0.0;
  const int nphi = n;
  for (int j = 0; j < nphi; ++j) {
    const double phi = 2.0 * pulab::kPi * (j + 0.5) / nphi;
    double s = integrand(0.0, phi) + integrand(pulab::kPi, phi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand(pulab::kPi * i / n, phi);
    total += s * (pulab::kPi / n) / 3.0;
  }
  return total * (2.0 * pulab::kPi / nphi);
}

// Arc length of the planar ellipse x = a*cos(t), y = c*sin(t) over [t0, t1]
// by Simpson quadrature.
inline double ellipse_arc_length(double a, double c, double t0, double t1, int n = 4096) {
  auto speed = [&](double t) {
    const double dx = -a * std::sin(t), dy = c * std::cos(t);
    return std::hypot(dx, dy);
  };
  double s = speed(t0) + speed(t1);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * speed(t0 + (t1 - t0) * i / n);
  return s * ((t1 - t0) / n) / 3.0;
}

// Brute-force minimum enclosing ball: try all support sets of size <= 4 and
// keep the smallest valid candidate. O(n^4); for small validation sets only.
struct BallOracle {
  Vec3 center;
  double radius;
};

inline BallOracle brute_force_min_ball(const std::vector<Vec3>& pts) {
  const double inf = std::numeric_limits<double>::infinity();
  BallOracle best{Vec3::Zero(), inf};
  const int n = static_cast<int>(pts.size());
  auto consider = [&](const Vec3& c, double r) {
    if (r >= best.radius) return;
    for (const Vec3& p : pts)
      if ((p - c).norm() > r * (1.0 + 1e-10) + 1e-14) return;
    best = {c, r};
  };
  for (int i = 0; i < n; ++i) consider(pts[i], 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec3 c = 0.5 * (pts[i] + pts[j]);
      consider(c, (pts[i] - c).norm());
    }
  // Circumcenter of three points (in their plane).
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3 u = pts[j] - pts[i], v = pts[k] - pts[i];
        const Vec3 w = u.cross(v);
        const double w2 = w.squaredNorm();
        if (w2 < 1e-24) continue;
        const Vec3 c =
            pts[i] + (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) / (2.0 * w2);
        consider(c, (pts[i] - c).norm());
      }
  // Circumcenter of four points via the linear system.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          Eigen::Matrix3d A;
          Eigen::Vector3d rhs;
          A.row(0) = 2.0 * (pts[j] - pts[i]).transpose();
          A.row(1) = 2.0 * (pts[k] - pts[i]).transpose();
          A.row(2) = 2.0 * (pts[l] - pts[i]).transpose();
          rhs << pts[j].squaredNorm() - pts[i].squaredNorm(),
              pts[k].squaredNorm() - pts[i].squaredNorm(),
              pts[l].squaredNorm() - pts[i].squaredNorm();
          if (std::abs(A.determinant()) < 1e-18) continue;
          const Vec3 c = A.partialPivLu().solve(rhs);
          consider(c, (pts[i] - c).norm());
        }
  return best;
}

}  // namespace testutil
