#pragma once

#include <vector>

#include "kkharm/fields/field_spec.hpp"
#include "kkharm/util/random.hpp"

namespace kkharm {

/// `count` random points of m: normalized Gaussians on spheres, uniform
/// coordinates on tori. When `field` is given, points where a Normalized
/// field's inner field has g-norm below min_norm are redrawn.
std::vector<Vector> sample_points(const Manifold& m, const FieldSpec* field, int count, Rng& rng,
                                  double min_norm = 1e-3);

}  // namespace kkharm
