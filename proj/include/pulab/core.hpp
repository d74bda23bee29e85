#pragma once

// Shared scalar types, error hierarchy and deterministic sampling helpers.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pulab {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

// Scale-invariant hull tolerance: tau_hull = kHullTolRel * (bounding box diagonal).
inline constexpr double kHullTolRel = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input degenerates to (nearly) a plane; no 3-dimensional hull exists.
struct FlatBodyError : Error {
  using Error::Error;
};

// Vertex set is not exactly centrally symmetric.
struct AsymmetricMeshError : Error {
  using Error::Error;
};

// Conformal factor is not even under the antipodal map.
struct EvennessError : Error {
  using Error::Error;
};

// Atom mass >= 2*pi: the cone metric degenerates.
struct DegenerateMassError : Error {
  using Error::Error;
};

// Iterative solver failed to reach the requested tolerance.
struct ToleranceError : Error {
  using Error::Error;
};

// A structural invariant is violated beyond tolerance.
struct InvariantError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line = 0;
  ParseError(const std::string& msg, int line_number)
      : Error("line " + std::to_string(line_number) + ": " + msg), line(line_number) {}
};

// Deterministic random stream. Raw mt19937_64 output is mapped to doubles
// explicitly so that generated bodies are byte-stable across platforms
// (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; pairs are drawn eagerly to keep the stream layout fixed.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

  Vec3 gaussian3() {
    const double x = gaussian();
    const double y = gaussian();
    const double z = gaussian();
    return Vec3(x, y, z);
  }

  Vec3 unit_direction() {
    Vec3 g = gaussian3();
    while (g.norm() < 1e-12) g = gaussian3();
    return g.normalized();
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Golden-angle spiral on the unit sphere; deterministic and roughly uniform.
inline std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return dirs;
}

// Static-chunked parallel loop. Iterations must be independent; results keyed
// by index stay deterministic regardless of the worker count.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min<int>(threads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Orthonormal basis of the plane orthogonal to a unit vector. The axis with
// the smallest |component| seeds the cross product, so the choice is stable.
inline void plane_basis(const Vec3& n, Vec3& u, Vec3& v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec3 e = Vec3::Zero();
  e[k] = 1.0;
  u = n.cross(e).normalized();
  v = n.cross(u);
}

}  // namespace pulab
