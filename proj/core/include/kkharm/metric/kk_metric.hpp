#pragma once

#include <map>
#include <optional>
#include <string>

#include "kkharm/geometry/manifold.hpp"
#include "kkharm/metric/profile.hpp"
#include "kkharm/util/types.hpp"

namespace kkharm {

/// Kaluza-Klein metric on TM:
///   G(X^h, Y^h) = A g(X, Y),  G(X^h, Y^v) = 0,
///   G(X^v, Y^v) = B g(X, Y) + C g(X, e) g(e, Y),
/// with A, B, C functions of t = |e|^2.
struct KKMetricSpec {
  std::string name = "custom";
  ScalarProfile A = ScalarProfile::constant(1.0);
  ScalarProfile B = ScalarProfile::constant(1.0);
  ScalarProfile C = ScalarProfile::constant(0.0);
  /// Validation horizon in units of |e|^2.
  double t_max = 2.0;
};

/// Profile values and derivatives at one t.
struct ProfileValues {
  double t = 0.0;
  double A = 0.0, dA = 0.0;
  double B = 0.0, dB = 0.0;
  double C = 0.0, dC = 0.0;
  /// B + t C, the vertical eigenvalue along e.
  double radial() const { return B + t * C; }
};

ProfileValues evaluate_profiles(const KKMetricSpec& spec, double t);

/// Same, throwing MetricDegeneracy unless A, B and B + tC are positive.
ProfileValues checked_profiles(const KKMetricSpec& spec, double t);

/// Named metric families:
///   "sasaki"            A = B = 1, C = 0
///   "g_mr" (m, r >= 0)  A = 1, B = (1+t)^{-m}, C = r (1+t)^{-m}
///   "cheeger-gromoll"   g_mr with m = r = 1
/// Throws InvalidInput for unknown names or parameters. The result has been
/// validated on [0, t_max].
KKMetricSpec preset(const std::string& name, const std::map<std::string, double>& params = {},
                    double t_max = 2.0);

struct ValidationReport {
  bool ok = true;
  double t_max = 0.0;
  double min_A = 0.0, min_B = 0.0, min_radial = 0.0;
  /// Smallest lower bound over grid cells, using endpoint values and slopes.
  double cell_bound = 0.0;
  /// Largest relative mismatch between derivative() and central differences.
  double derivative_mismatch = 0.0;
  /// First grid t where positivity fails (if any).
  std::optional<double> failure_t;
  std::string message;
};

/// Checks A > 0, B > 0 and B + tC > 0 on a 1e-3 grid of [0, t_max] together
/// with a first-order bound inside each cell, and compares every derivative
/// with central differences (tolerance 1e-7 relative). The vertical block has
/// eigenvalues B (multiplicity n-1) and B + tC, hence the test.
ValidationReport validate(const KKMetricSpec& spec);

/// Horizontal and vertical parts of a vector of T_{(p,e)}TM.
struct LiftPair {
  Vector point;
  Vector fibre;
  Vector horizontal;
  Vector vertical;
};

LiftPair horizontal_lift(const Vector& p, const Vector& e, const Vector& x);
LiftPair vertical_lift(const Vector& p, const Vector& e, const Vector& x);

/// G(U, W) at the common base point of U and W. The horizontal-vertical block
/// is zero by construction.
double metric_on_lifts(const KKMetricSpec& spec, const Manifold& m, const LiftPair& u,
                       const LiftPair& w);

enum class LiftCase { kHH, kHV, kVH, kVV };

LiftCase parse_lift_case(const std::string& tag);

/// Levi-Civita connection of G on lifts, at (p, e):
///   hh: nabla_{X^h} Y^h = (nabla_X Y)^h - A'/(B+tC) g(X,Y) e^v - 1/2 (R(X,Y)e)^v
///   hv: nabla_{X^h} Y^v = (-B/(2A) R(Y,e)X + A'/A g(Y,e) X)^h + (nabla_X Y)^v
///   vh: nabla_{X^v} Y^h = (B/(2A) R(e,X)Y + A'/A g(X,e) Y)^h
///   vv: nabla_{X^v} Y^v = B'/B (g(X,e) Y + g(Y,e) X)^v
///        + (C' - 2B'C/B)/(B+tC) g(X,e) g(Y,e) e^v + (C-B')/(B+tC) g(X,Y) e^v
/// `nabla_x_y` is nabla_X Y of the base field extending Y; it enters only the
/// hh and hv cases. The vv result never has a horizontal part.
LiftPair connection_eval(const KKMetricSpec& spec, const Manifold& m, const Vector& p,
                         const Vector& e, LiftCase lift_case, const Vector& x, const Vector& y,
                         const Vector& nabla_x_y);

}  // namespace kkharm
