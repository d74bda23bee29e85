#pragma once

// Extrinsic radii of symmetric convex bodies: minimum enclosing ball,
// polyhedral inradius, and the centered minimum-volume enclosing ellipsoid
// (MVEE) with John sandwich certification.
//
// The MVEE is solved in the symmetric (centered) formulation by
// multiplicative-weights / Frank-Wolfe ascent with away steps on
// log det(sum u_i x_i x_i^T). For any weights u the inertia ellipsoid
// E_u = {x : x^T Lambda(u)^{-1} x <= 1} satisfies E_u subset conv(+-x_i),
// which yields the inner containment of the sandwich without extra
// assumptions; at termination all points satisfy x^T Lambda^{-1} x <= kappa
// with kappa <= 3 (1 + eps), so E* = sqrt(kappa) E_u encloses every vertex
// and E*/sqrt(3 (1 + eps)) always sits inside the body.

#include <Eigen/Dense>

#include "pulab/core.hpp"
#include "pulab/mesh.hpp"

namespace pulab {

struct Ellipsoid {
  Mat3 frame = Mat3::Identity();  // columns: principal directions
  Vec3 semi_axes = Vec3::Ones();  // ascending: a <= b <= c

  // Quadratic form value; inside iff <= 1.
  double quad(const Vec3& x) const {
    const Vec3 y = frame.transpose() * x;
    return (y.cwiseQuotient(semi_axes)).squaredNorm();
  }

  Vec3 boundary_point(const Vec3& unit_dir) const {
    return frame * semi_axes.cwiseProduct(unit_dir);
  }

  Ellipsoid scaled(double s) const {
    Ellipsoid e = *this;
    e.semi_axes *= s;
    return e;
  }

  double volume() const { return 4.0 / 3.0 * kPi * semi_axes.prod(); }
};

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

// Origin-centered minimum enclosing ball of a centrally symmetric vertex set:
// by symmetry the origin is an optimal center, so R is the maximal norm.
inline Ball min_enclosing_ball(const SymmetricConvexMesh& m) {
  double r = 0.0;
  for (const Vec3& v : m.vertices) r = std::max(r, v.norm());
  return {Vec3::Zero(), r};
}

namespace detail {

inline bool in_ball(const Vec3& p, const Ball& b) {
  return (p - b.center).norm() <= b.radius * (1.0 + 1e-10) + 1e-14;
}

inline Ball ball_2(const Vec3& a, const Vec3& b) {
  const Vec3 c = 0.5 * (a + b);
  return {c, (a - c).norm()};
}

inline Ball ball_3(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a, v = c - a;
  const Vec3 w = u.cross(v);
  const double w2 = w.squaredNorm();
  if (w2 < 1e-30) {
    Ball best = ball_2(a, b);
    for (const Ball cand : {ball_2(a, c), ball_2(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const Vec3 center = a + (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) / (2.0 * w2);
  return {center, (a - center).norm()};
}

inline Ball ball_4(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Mat3 A;
  Vec3 rhs;
  A.row(0) = 2.0 * (b - a).transpose();
  A.row(1) = 2.0 * (c - a).transpose();
  A.row(2) = 2.0 * (d - a).transpose();
  rhs << b.squaredNorm() - a.squaredNorm(), c.squaredNorm() - a.squaredNorm(),
      d.squaredNorm() - a.squaredNorm();
  if (std::abs(A.determinant()) < 1e-24) return ball_3(a, b, c);
  const Vec3 center = A.partialPivLu().solve(rhs);
  return {center, (a - center).norm()};
}

}  // namespace detail

// General-position Welzl solver (move-to-front, deterministic shuffle).
// Retained for validation against the symmetric fast path.
inline Ball welzl_ball(std::vector<Vec3> pts) {
  if (pts.empty()) return {};
  std::mt19937_64 eng(0x2545f4914f6cdd1dULL);
  for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[eng() % i]);
  using detail::in_ball;
  Ball b{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (in_ball(pts[i], b)) continue;
    b = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (in_ball(pts[j], b)) continue;
      b = detail::ball_2(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (in_ball(pts[k], b)) continue;
        b = detail::ball_3(pts[i], pts[j], pts[k]);
        for (std::size_t l = 0; l < k; ++l) {
          if (in_ball(pts[l], b)) continue;
          b = detail::ball_4(pts[i], pts[j], pts[k], pts[l]);
        }
      }
    }
  }
  return b;
}

// Exact polyhedral inradius about the origin: minimum distance from the
// origin to a face plane. For centrally symmetric convex bodies the largest
// inscribed ball can be centered at the origin, so this is the inradius.
inline double inradius(const SymmetricConvexMesh& m) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    const Vec3 n = (m.vertices[t[1]] - a).cross(m.vertices[t[2]] - a);
    const double len = n.norm();
    if (len <= 0.0) continue;
    const double d = n.dot(a) / len;
    if (d <= 0.0) throw InvariantError("inradius: origin outside a face half-space");
    r = std::min(r, d);
  }
  if (!std::isfinite(r)) throw InvariantError("inradius: no valid faces");
  return r;
}

namespace detail {

// 6-parameter encoding of a symmetric 3x3 matrix: (11, 22, 33, 12, 13, 23).
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Mat3 sym_from_vec6(const Vec6& q) {
  Mat3 m;
  m << q[0], q[3], q[4], q[3], q[1], q[5], q[4], q[5], q[2];
  return m;
}

// Row a(x) with x^T Q x = a(x) . q.
inline Vec6 quad_row(const Vec3& x) {
  Vec6 a;
  a << x.x() * x.x(), x.y() * x.y(), x.z() * x.z(), 2.0 * x.x() * x.y(), 2.0 * x.x() * x.z(),
      2.0 * x.y() * x.z();
  return a;
}

// tr(M E_k) over the basis behind sym_from_vec6.
inline Vec6 trace_row(const Mat3& m) {
  Vec6 g;
  g << m(0, 0), m(1, 1), m(2, 2), 2.0 * m(0, 1), 2.0 * m(0, 2), 2.0 * m(1, 2);
  return g;
}

}  // namespace detail

// Centered MVEE E* of the vertex set, to relative volume tolerance eps.
//
// Solved as the 6-variable convex program max log det Q subject to
// x_i^T Q x_i <= 1 by a damped-Newton log-barrier path following; the barrier
// multipliers 1/s_i provide the dual weights u with
// Lambda(u) = sum u_i x_i x_i^T, whose inertia ellipsoid always sits inside
// conv(+-x_i). The returned E* = sqrt(kappa_max) E_Lambda therefore encloses
// every vertex by construction and E*/sqrt(3 (1 + eps)) is certified inside
// the body. (Multiplicative-weights ascent was tried first and stalls beyond
// the iteration cap on bodies whose contact set is a ring, e.g. capped
// cylinders, so the ellipsoid is computed by Newton steps instead; the dual
// certificate is identical.)
inline Ellipsoid mvee_symmetric(const std::vector<Vec3>& input_pts, double eps = 1e-6,
                                int max_iterations = 100000) {
  if (!(eps > 0.0) || eps > 0.1) throw InvariantError("mvee: eps out of (0, 0.1]");
  if (input_pts.size() < 3) throw FlatBodyError("mvee: too few points");

  // Symmetric formulation: x and -x contribute the same rank-one term, so
  // each exact antipodal pair collapses to one representative.
  std::vector<Vec3> pts;
  {
    std::unordered_map<detail::PointKey, int, detail::PointKeyHash> seen;
    pts.reserve(input_pts.size());
    for (const Vec3& p : input_pts) {
      if (seen.count(detail::point_key(p)) || seen.count(detail::point_key(Vec3(-p)))) continue;
      seen.emplace(detail::point_key(p), 1);
      pts.push_back(p);
    }
  }
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw FlatBodyError("mvee: too few distinct directions");

  Mat3 moment = Mat3::Zero();
  double scale2 = 0.0;
  for (const Vec3& p : pts) {
    moment += p * p.transpose() / n;
    scale2 = std::max(scale2, p.squaredNorm());
  }
  if (moment.determinant() < 1e-30 * scale2 * scale2 * scale2)
    throw FlatBodyError("mvee: rank-deficient vertex set");

  Eigen::MatrixXd A(n, 6);
  for (int i = 0; i < n; ++i) A.row(i) = detail::quad_row(pts[i]).transpose();

  // Strictly feasible start: a ball comfortably containing all points.
  detail::Vec6 q = detail::Vec6::Zero();
  q[0] = q[1] = q[2] = 0.5 / scale2;

  int newton_steps = 0;
  double t = 1.0;
  const double t_final = 4.0 * n / eps;
  for (;;) {
    // Centering in the t-scaled objective -log det Q - (1/t) sum log s_i,
    // which stays O(1) as t grows so the Armijo test is roundoff-safe.
    for (;;) {
      const Eigen::VectorXd slack = (1.0 - (A * q).array()).matrix();
      const Mat3 Q = detail::sym_from_vec6(q);
      const Mat3 Qinv = Q.inverse();
      const detail::Vec6 grad =
          -detail::trace_row(Qinv) + A.transpose() * slack.cwiseInverse() / t;

      detail::Mat6 H = detail::Mat6::Zero();
      {
        Mat3 basis[6];
        for (int k = 0; k < 6; ++k) basis[k] = Mat3::Zero();
        basis[0](0, 0) = basis[1](1, 1) = basis[2](2, 2) = 1.0;
        basis[3](0, 1) = basis[3](1, 0) = 1.0;
        basis[4](0, 2) = basis[4](2, 0) = 1.0;
        basis[5](1, 2) = basis[5](2, 1) = 1.0;
        Mat3 m[6];
        for (int k = 0; k < 6; ++k) m[k] = Qinv * basis[k];
        for (int k = 0; k < 6; ++k)
          for (int l = k; l < 6; ++l) H(k, l) = H(l, k) = (m[k] * m[l]).trace();
      }
      H.noalias() +=
          A.transpose() * slack.array().square().inverse().matrix().asDiagonal() * A / t;

      const detail::Vec6 step = -H.ldlt().solve(grad);
      const double decrement2 = -grad.dot(step);
      if (!(decrement2 > 1e-12)) break;  // centered

      double alpha = 1.0;
      bool moved = false;
      const double phi0 = -std::log(Q.determinant()) - slack.array().log().sum() / t;
      for (int back = 0; back < 60; ++back, alpha *= 0.5) {
        const detail::Vec6 trial = q + alpha * step;
        const Eigen::VectorXd ts = (1.0 - (A * trial).array()).matrix();
        if (ts.minCoeff() <= 0.0) continue;
        const Mat3 TQ = detail::sym_from_vec6(trial);
        Eigen::LLT<Mat3> llt(TQ);
        if (llt.info() != Eigen::Success) continue;
        const double phi = -std::log(TQ.determinant()) - ts.array().log().sum() / t;
        if (phi <= phi0 - 0.25 * alpha * decrement2) {
          q = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;  // at the numerical floor of this centering
      if (++newton_steps > max_iterations)
        throw ToleranceError("mvee: no convergence within iteration cap");
    }
    if (t >= t_final) break;
    t = std::min(20.0 * t, t_final);
  }

  // Dual certificate: at the barrier center, t Q^{-1} = sum x_i x_i^T / s_i.
  const Eigen::VectorXd slack = (1.0 - (A * q).array()).matrix();
  Mat3 lambda = Mat3::Zero();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / std::max(1e-300, slack[i]);
    lambda += w * pts[i] * pts[i].transpose();
    total += w;
  }
  lambda /= total;
  const Mat3 inv = lambda.inverse();
  double kmax = 0.0;
  for (int i = 0; i < n; ++i) kmax = std::max(kmax, pts[i].dot(inv * pts[i]));
  if (!(kmax <= 3.0 * (1.0 + eps)))
    throw ToleranceError("mvee: dual certificate misses the tolerance");

  // E* = { x : x^T Lambda^{-1} x <= kappa_max }: every input point is inside
  // by the definition of kappa_max.
  Eigen::SelfAdjointEigenSolver<Mat3> eig(lambda);
  Ellipsoid e;
  e.semi_axes = (kmax * eig.eigenvalues().array()).sqrt().matrix();
  e.frame = eig.eigenvectors();
  for (int c = 0; c < 3; ++c) {  // deterministic column signs
    int arg = 0;
    for (int r = 1; r < 3; ++r)
      if (std::abs(e.frame(r, c)) > std::abs(e.frame(arg, c))) arg = r;
    if (e.frame(arg, c) < 0.0) e.frame.col(c) *= -1.0;
  }
  return e;
}

inline Ellipsoid john_ellipsoid(const SymmetricConvexMesh& m, double eps = 1e-6) {
  return mvee_symmetric(m.vertices, eps);
}

struct SandwichReport {
  bool outer_ok = false;       // vertices inside sqrt(3) (1 + eps) E
  bool inner_ok = false;       // sampled boundary of E / (1 + eps) inside hull
  double outer_margin = 0.0;   // min over vertices of 1 - quad form (>= 0 is ok)
  double inner_margin = 0.0;   // max over samples/faces of signed plane excess (<= tol is ok)
  int samples = 0;

  bool ok() const { return outer_ok && inner_ok; }
};

// Verifies E subset S_g subset sqrt(3) E for the paper-normalized ellipsoid
// E = E*/sqrt(3), with (1 + eps) relaxation on both sides.
inline SandwichReport sandwich_check(const SymmetricConvexMesh& m, const Ellipsoid& e, double eps,
                                     int samples = 10000) {
  SandwichReport rep;
  rep.samples = samples;

  const Ellipsoid outer = e.scaled(std::sqrt(3.0) * (1.0 + eps));
  double worst_out = std::numeric_limits<double>::infinity();
  for (const Vec3& v : m.vertices) worst_out = std::min(worst_out, 1.0 - outer.quad(v));
  rep.outer_margin = worst_out;
  rep.outer_ok = worst_out >= -1e-9;

  const int nf = m.num_triangles();
  Eigen::MatrixXd normals(nf, 3);
  Eigen::VectorXd offsets(nf);
  for (int f = 0; f < nf; ++f) {
    const auto& t = m.triangles[f];
    const Vec3& a = m.vertices[t[0]];
    const Vec3 n = (m.vertices[t[1]] - a).cross(m.vertices[t[2]] - a).normalized();
    normals.row(f) = n.transpose();
    offsets[f] = n.dot(a);
  }
  const Ellipsoid inner = e.scaled(1.0 / (1.0 + eps));
  double worst_in = -std::numeric_limits<double>::infinity();
  for (const Vec3& dir : fibonacci_sphere(samples)) {
    const Vec3 p = inner.boundary_point(dir);
    worst_in = std::max(worst_in, (normals * p - offsets).maxCoeff());
  }
  rep.inner_margin = worst_in;
  rep.inner_ok = worst_in <= 1e-7 * m.bbox_diagonal();
  return rep;
}

struct RadiiReport {
  double R = 0.0;
  double r = 0.0;
  double gap = 0.0;
  Ellipsoid john;  // paper normalization: E subset S_g subset sqrt(3) E
  Ellipsoid mvee;  // E* = sqrt(3) E, the enclosing ellipsoid

  Vec3 mvee_axes() const { return mvee.semi_axes; }
};

inline RadiiReport radii_report(const SymmetricConvexMesh& m, double eps = 1e-6) {
  RadiiReport rep;
  rep.R = min_enclosing_ball(m).radius;
  rep.r = inradius(m);
  rep.gap = rep.R - rep.r;
  rep.mvee = john_ellipsoid(m, eps);
  rep.john = rep.mvee.scaled(1.0 / std::sqrt(3.0));

  const double tol = 1e-9 * rep.R + eps * rep.R;
  const double a = rep.john.semi_axes[0];
  const double c = rep.john.semi_axes[2];
  if (!(rep.r > 0.0) || rep.r > rep.R * (1.0 + 1e-12))
    throw InvariantError("radii_report: inradius/circumradius ordering violated");
  if (a > std::sqrt(3.0) * rep.r + tol)
    throw InvariantError("radii_report: John minor axis exceeds sqrt(3) r");
  if (c < rep.R / std::sqrt(3.0) - tol)
    throw InvariantError("radii_report: John major axis below R / sqrt(3)");
  return rep;
}

}  // namespace pulab
