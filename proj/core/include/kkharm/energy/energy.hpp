#pragma once

#include <string>
#include <vector>

#include "kkharm/energy/quadrature.hpp"
#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/calculus.hpp"
#include "kkharm/geometry/potential.hpp"
#include "kkharm/metric/kk_metric.hpp"

namespace kkharm {

/// Vector field sampled on the uniform N x N grid of a torus, in coordinate
/// components. Node (i, j) sits at (i hx, j hy) with index i * N + j, the
/// same layout as torus_quadrature.
struct DiscreteField {
  int resolution = 0;
  Eigen::Vector2d periods{0.0, 0.0};
  std::vector<Eigen::Vector2d> values;
  bool unit_constrained = false;

  int index(int i, int j) const;
  Vector point(int i, int j) const;
  double hx() const { return periods[0] / resolution; }
  double hy() const { return periods[1] / resolution; }

  static DiscreteField sample(const Manifold& m, const FieldSpec& field, int resolution);
  /// max | |value|_g - 1 | over the grid.
  double unit_defect(const Manifold& m) const;
};

/// |d sigma|^2 / 2 = (m A + B |nabla sigma|^2 + C |X(sigma)|^2) / 2 with the
/// profiles at |sigma|^2.
double energy_density(const Manifold& m, const KKMetricSpec& spec, const FieldCalculus& calc);

/// E(sigma) = 1/2 int |d sigma|^2 v_g.
double energy(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
              const Quadrature& q, CalculusPath path = CalculusPath::kAnalytic);

/// 1/2 int B(|sigma|^2) |nabla sigma|^2 v_g, the only part of the energy of a
/// unit section that depends on the section.
double section_energy(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                      const Quadrature& q);

/// Energy of a sampled torus field with sixth order central differences.
double discrete_energy(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f);

/// First variation check: dE/dt at t = 0 (central difference in t) against
/// -int <tau(sigma), variation>_G.
struct DualityResult {
  double derivative = 0.0;
  double predicted = 0.0;
  double absolute = 0.0;
  /// absolute / max(|predicted|, 1e-12)
  double relative = 0.0;
};

/// Variation sigma + t V through sections.
DualityResult section_variation_duality(const Manifold& m, const KKMetricSpec& spec,
                                        const FieldSpec& field, const FieldSpec& variation,
                                        const Quadrature& q, double h = 1e-4);

/// Variation through maps on a sphere: the base point moves along the
/// geodesic with velocity W(x) and sigma(x) is parallel transported along
/// it, so the variation field is W^h. Only the horizontal tension enters.
DualityResult map_variation_duality(const Manifold& m, const KKMetricSpec& spec,
                                    const FieldSpec& field, const FieldSpec& direction,
                                    const Quadrature& q, double h = 1e-3);

/// Section variation on a torus grid: the derivative is taken of
/// discrete_energy, the prediction uses the exact tension at the nodes.
DualityResult torus_duality(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                            const DiscreteField& variation, double h = 1e-4);

/// g~ = e^{2u} g on a torus, sigma~ = e^{exponent * u} sigma. Only exponent
/// -1 keeps unit sections unit.
struct ConformalChange {
  Potential u;
  double exponent = -1.0;

  Manifold target(const Manifold& base) const;
  FieldJet transform(const Manifold& base, const FieldJet& jet, const Vector& p) const;
};

struct EnergyDelta {
  double before = 0.0;
  double after = 0.0;
  /// after - before, both by section_energy.
  double measured = 0.0;
  /// B(1)/2 (int |grad u|^2 + 2 int u K_g) v_g
  double predicted = 0.0;
};

/// Section energies of a unit field before and after a conformal change.
/// Throws InvalidInput if the field is not unit or the change does not keep
/// it unit.
EnergyDelta conformal_energy_delta(const Manifold& m, const ConformalChange& change,
                                   const FieldSpec& field, const KKMetricSpec& spec,
                                   int resolution);

/// int <nabla* nabla sigma, sigma> - Ric(sigma, sigma) - |L_sigma g|^2/2
/// + (Div sigma)^2, which vanishes on closed manifolds.
double yano_integral(const Manifold& m, const FieldSpec& field, const Quadrature& q,
                     CalculusPath path = CalculusPath::kAnalytic);

}  // namespace kkharm
