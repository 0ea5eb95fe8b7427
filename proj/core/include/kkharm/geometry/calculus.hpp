#pragma once

#include <functional>

#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/manifold.hpp"
#include "kkharm/util/types.hpp"

namespace kkharm {

/// First and second order covariant data of a vector field at one point.
///
/// covariant_jacobian(a, b) = g(nabla_{e_b} sigma, e_a) in the orthonormal
/// frame `frame`; `derivatives` holds the same vectors nabla_{e_b} sigma in
/// ambient (sphere) or coordinate (torus) components.
struct FieldCalculus {
  Vector point;
  Vector value;
  Matrix frame;
  Matrix derivatives;
  Matrix covariant_jacobian;
  Vector rough_laplacian;
  Vector grad_half_norm;
  double jacobian_norm_sq = 0.0;
  double divergence = 0.0;
  double lie_norm_sq = 0.0;
  double norm_sq = 0.0;

  /// nabla_X sigma for an ambient tangent vector X at `point`.
  Vector derivative_along(const Manifold& m, const Vector& x) const;
};

enum class CalculusPath {
  /// Closed-form jets of the catalog fields.
  kAnalytic,
  /// Geodesic stencils with parallel transported frames; needs only values.
  kStencil,
};

using VectorFieldFn = std::function<Vector(const Vector&)>;
using ScalarFieldFn = std::function<double(const Vector&)>;

/// Step used by the stencil path. Second differences at this step balance
/// O(h^2) truncation against O(eps/h^2) rounding near 1e-8.
inline constexpr double kStencilStep = 1e-4;

FieldCalculus field_calculus(const Manifold& m, const FieldSpec& field, const Vector& p,
                             CalculusPath path = CalculusPath::kAnalytic);

/// Assembles the calculus from an exact second-order jet of the ambient or
/// coordinate expression of a field.
FieldCalculus calculus_from_jet(const Manifold& m, const Vector& p, const FieldJet& jet);

/// Fills the derived entries (Jacobian, X(sigma), norms, divergence, Lie norm)
/// from the value, nabla_{e_b} sigma and the rough Laplacian.
FieldCalculus assemble_calculus(const Manifold& m, const Vector& p, Vector value,
                                Matrix derivatives, Vector rough_laplacian);

/// Stencil calculus of an arbitrary smooth field given by its values.
///
/// First derivatives use Richardson-extrapolated central differences with
/// step 10h; second derivatives use plain second differences with step h.
FieldCalculus stencil_calculus(const Manifold& m, const VectorFieldFn& field, const Vector& p,
                               double h = kStencilStep);

/// nabla_X sigma. Linear in X.
Vector covariant_derivative(const Manifold& m, const FieldSpec& field, const PointTangent& x);

/// Positive Laplacian -trace Hess f (so Delta <a,x> = n <a,x> on S^n), by
/// geodesic second differences.
double scalar_laplacian(const Manifold& m, const ScalarFieldFn& f, const Vector& p,
                        double h = kStencilStep);

/// Div W from the stencil Jacobian of W.
double divergence(const Manifold& m, const VectorFieldFn& w, const Vector& p,
                  double h = 10 * kStencilStep);

}  // namespace kkharm
