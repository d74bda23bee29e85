#pragma once

#include <cstdint>

namespace pulab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Tool-wide defaults; mirrored in share/defaults.json (a test keeps the two
// in sync).
struct Defaults {
  int steiner = 3;
  int level = -1;  // -1: pick the refinement so that max edge < sys / 20
  int max_auto_level = 6;
  double eps = 1e-6;
  int grid_level = 5;
  int n_t = 256;
  int bins = 12;
  std::uint64_t seed = 42;
  int threads = 1;
  int polytope_points = 64;
  int sandwich_samples = 10000;
  int scan_cap = 700;
  int band_cap = 48;
};

inline constexpr Defaults kDefaults{};

}  // namespace pulab
