#pragma once

#include <vector>

#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/calculus.hpp"

namespace kkharm {

/// Invariant axis of a Killing rotation on S^n: the fixed subspace of its
/// flow, of dimension ambient_dim - 2 * (number of rotating planes).
struct AxisInfo {
  int dim = 0;
  /// n = 2p or n = 2p + 1.
  int p = 0;
  /// dim = 2k + 1 on even spheres, dim = 2k on odd spheres.
  int k = 0;
  /// k = p - 1 on even spheres, k = p on odd spheres.
  bool maximal = false;
};

AxisInfo axis_info(const std::vector<double>& thetas, int ambient_dim);

/// Closed-form calculus of the catalog fields on spheres, written without
/// field jets so it can serve as an independent oracle for field_calculus.
///
/// Supported: Conformal, QuadraticGradient, KillingRotation, Normalized and
/// Scaled wrappers of a Killing rotation, and any field on the flat torus
/// that is constant (ParallelTorus). Throws Unsupported otherwise.
FieldCalculus closed_form_oracle(const Manifold& m, const FieldSpec& field, const Vector& p);

}  // namespace kkharm
