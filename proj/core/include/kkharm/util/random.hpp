#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "kkharm/util/types.hpp"

namespace kkharm {

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, whose algorithms are implementation-defined: uniforms use the top
/// 53 bits of one engine draw, normals use the Box-Muller transform with both
/// outputs consumed in order. Identical seeds therefore give identical samples
/// on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();
  /// Vector of i.i.d. standard normals.
  Vector normal_vector(int size);
  /// Uniform point on the unit sphere S^{dim-1} of R^dim (normalized Gaussian).
  Vector unit_vector(int dim);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a child seed from a parent seed and a label (FNV-1a over the label,
/// mixed with splitmix64). Used so each suite case gets an independent stream.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

}  // namespace kkharm
