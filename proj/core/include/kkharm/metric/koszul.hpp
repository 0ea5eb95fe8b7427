#pragma once

#include <cstdint>

#include "kkharm/metric/kk_metric.hpp"

namespace kkharm {

struct KoszulReport {
  int samples = 0;
  /// max |U G(V,W) - G(nabla_U V, W) - G(V, nabla_U W)|
  double metric_residual = 0.0;
  /// max |nabla_U V - nabla_V U - [U,V]| (Euclidean norm in R^{2(n+1)})
  double torsion_residual = 0.0;
};

/// Finite-difference certificate that connection_eval is the Levi-Civita
/// connection of G on TS^n.
///
/// TS^n sits in R^{n+1} x R^{n+1}; there X^h = (X, -<e,X> x) and X^v = (0, X).
/// At each random (p, e) three random lift fields U, V, W are built from
/// projected linear base fields x -> P_x(L x), and both identities are tested
/// with Richardson-extrapolated central differences of the fields extended off
/// TS^n by projection.
KoszulReport koszul_residuals(const KKMetricSpec& spec, int n, int samples, std::uint64_t seed);

}  // namespace kkharm
