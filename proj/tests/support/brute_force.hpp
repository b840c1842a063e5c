#pragma once

// Deliberately naive references used only by tests.

#include <algorithm>
#include <cmath>
#include <random>

#include "voxproj/frame.hpp"
#include "voxproj/volume.hpp"

namespace voxproj::test {

inline double kernel(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

// Literal sum over every voxel: sum_nml V_nml k(x - m) k(y - n) k(z - l).
inline double brute_force_sample(const VoxelGrid& v, const Vec3& p) {
  double sum = 0.0;
  for (std::size_t n = 0; n < v.dims.h; ++n) {
    for (std::size_t m = 0; m < v.dims.w; ++m) {
      for (std::size_t l = 0; l < v.dims.d; ++l) {
        sum += v.at(n, m, l) * kernel(p.x() - static_cast<double>(m)) *
               kernel(p.y() - static_cast<double>(n)) *
               kernel(p.z() - static_cast<double>(l));
      }
    }
  }
  return sum;
}

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline VoxelGrid random_grid(const Dims3& dims, std::mt19937_64& rng, double lo = 0.0,
                             double hi = 1.0) {
  VoxelGrid v(dims);
  for (double& x : v.values) x = uniform(rng, lo, hi);
  return v;
}

}  // namespace voxproj::test
