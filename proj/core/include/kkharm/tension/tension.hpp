#pragma once

#include <map>
#include <string>
#include <vector>

#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/calculus.hpp"
#include "kkharm/metric/kk_metric.hpp"

namespace kkharm {

/// Default tolerances of the two calculus paths.
inline constexpr double kAnalyticTolerance = 1e-8;
inline constexpr double kStencilTolerance = 1e-4;

struct TensionResult {
  Vector horizontal;
  Vector vertical;
  /// |tau|_G at (p, sigma(p)).
  double norm_G = 0.0;
  /// g-norms of the two components.
  double horizontal_norm = 0.0;
  double vertical_norm = 0.0;
  /// g-norm of the part of tau^v orthogonal to sigma.
  double unit_norm = 0.0;
  bool harmonic_map = false;
  bool harmonic_section = false;
  bool unit_section = false;
};

/// Tension of sigma : M -> (TM, G):
///   tau^h = -(B/A) sum_i R(nabla_i sigma, sigma) e_i + (2A'/A) X(sigma)
///   tau^v = -nabla* nabla sigma + (2B'/B) nabla_{X(sigma)} sigma
///           + [-m A' + (C' - 2B'C/B)|X(sigma)|^2 + (C - B')|nabla sigma|^2]
///             sigma / (B + |sigma|^2 C)
/// with profiles evaluated at |sigma|^2 and m = dim M. Throws
/// MetricDegeneracy where A, B or B + |sigma|^2 C is not positive.
TensionResult tension(const Manifold& m, const KKMetricSpec& spec, const FieldCalculus& calc,
                      double tol = kAnalyticTolerance);
TensionResult tension(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                      const Vector& p, CalculusPath path = CalculusPath::kAnalytic);

/// The same tension assembled from connection_eval:
///   tau = sum_i nabla_{d sigma(e_i)} d sigma(e_i) - d sigma(nabla_{e_i} e_i)
/// with d sigma(X) = X^h + (nabla_X sigma)^v, the second-order terms of the
/// vertical part collapsing to -nabla* nabla sigma.
TensionResult tension_via_connection(const Manifold& m, const KKMetricSpec& spec,
                                     const FieldCalculus& calc, double tol = kAnalyticTolerance);

/// -(B/A) kappa (nabla_sigma sigma - (Div sigma) sigma) + (2A'/A) X(sigma), the
/// horizontal tension on a base of constant curvature kappa.
Vector constant_curvature_horizontal(const Manifold& m, const KKMetricSpec& spec,
                                     const FieldCalculus& calc);

/// B(k^2) + k^2 B'(k^2). A non-parallel field of constant norm k can only be
/// harmonic where this vanishes.
double constant_norm_condition(const ScalarProfile& b, double k);

/// nabla* nabla alpha - |nabla alpha|^2 alpha for a unit field alpha: the
/// Euler-Lagrange operator of the energy restricted to unit fields for the
/// Sasaki metric. Throws InvalidInput unless |alpha(p)| = 1 within 1e-9.
Vector unit_section_residual(const Manifold& m, const FieldCalculus& calc);
Vector unit_section_residual(const Manifold& m, const FieldSpec& field, const Vector& p,
                             CalculusPath path = CalculusPath::kAnalytic);

struct IdentityResidual {
  bool applicable = false;
  double value = 0.0;
  std::string reason;
};

/// Named residuals |lhs - rhs| of the identities tying tension and geometry:
///   "laplacian_norm"   Delta |sigma|^2/2 + <tau^v, sigma> against the
///                      right-hand side of the Delta |sigma|^2/2 identity
///                      (which reduces to it when tau^v = 0); the Laplacian
///                      is taken by geodesic stencil
///   "surface"          Div[Div(X) X - nabla_X X] + K_g for the frame
///                      X = sigma/|sigma| (surfaces, sigma(p) != 0)
///   "constant_curvature_horizontal"  tau^h against its constant-curvature form
///   "connection_route" |tau - tension_via_connection|_G
std::map<std::string, IdentityResidual> identity_checks(const Manifold& m,
                                                        const KKMetricSpec& spec,
                                                        const FieldSpec& field, const Vector& p);

/// Div[Div(X) X - nabla_X X] + K_g at p for the unit field X = field/|field|.
double surface_identity_residual(const Manifold& m, const FieldSpec& field, const Vector& p);

/// Pointwise Yano integrand <nabla* nabla sigma, sigma> - Ric(sigma, sigma)
/// - |L_sigma g|^2 / 2 + (Div sigma)^2.
double yano_integrand(const Manifold& m, const FieldCalculus& calc);

/// Worst-case aggregation of tension residuals over sample points.
struct ResidualReport {
  std::string field_id;
  std::string metric_id;
  int samples = 0;
  double tolerance = 0.0;
  double max_norm_G = 0.0, mean_norm_G = 0.0;
  double max_horizontal = 0.0, mean_horizontal = 0.0;
  double max_vertical = 0.0, mean_vertical = 0.0;
  double max_unit = 0.0, mean_unit = 0.0;
  /// "harmonic map", "harmonic section", "unit harmonic section" or
  /// "not harmonic".
  std::string verdict;
};

ResidualReport residual_report(const Manifold& m, const KKMetricSpec& spec,
                               const FieldSpec& field, const std::vector<Vector>& points,
                               double tol, CalculusPath path = CalculusPath::kAnalytic);

}  // namespace kkharm
