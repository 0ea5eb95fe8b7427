#include "kkharm/tension/tension.hpp"

#include <cmath>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

TensionResult finish(const Manifold& m, const ProfileValues& v, const FieldCalculus& calc,
                     Vector horizontal, Vector vertical, double tol) {
  const Vector& p = calc.point;
  TensionResult r;
  r.horizontal = std::move(horizontal);
  r.vertical = std::move(vertical);
  r.horizontal_norm = std::sqrt(m.norm_sq(p, r.horizontal));
  r.vertical_norm = std::sqrt(m.norm_sq(p, r.vertical));
  const double along = m.inner(p, r.vertical, calc.value);
  r.norm_G = std::sqrt(std::max(0.0, v.A * r.horizontal_norm * r.horizontal_norm +
                                         v.B * r.vertical_norm * r.vertical_norm +
                                         v.C * along * along));
  Vector orthogonal = r.vertical;
  if (calc.norm_sq > 0.0) orthogonal -= (along / calc.norm_sq) * calc.value;
  r.unit_norm = std::sqrt(m.norm_sq(p, orthogonal));
  r.harmonic_map = r.norm_G < tol;
  r.harmonic_section = r.vertical_norm < tol;
  r.unit_section = r.unit_norm < tol;
  return r;
}

}  // namespace

TensionResult tension(const Manifold& m, const KKMetricSpec& spec, const FieldCalculus& calc,
                      double tol) {
  const Vector& p = calc.point;
  const ProfileValues v = checked_profiles(spec, calc.norm_sq);
  const int dim = m.dimension();

  Vector horizontal = (2.0 * v.dA / v.A) * calc.grad_half_norm;
  for (int i = 0; i < dim; ++i) {
    horizontal -= (v.B / v.A) * m.riemann(p, calc.derivatives.col(i), calc.value, calc.frame.col(i));
  }

  const double x_sq = m.norm_sq(p, calc.grad_half_norm);
  const double coefficient = (-dim * v.dA + (v.dC - 2.0 * v.dB * v.C / v.B) * x_sq +
                              (v.C - v.dB) * calc.jacobian_norm_sq) /
                             v.radial();
  Vector vertical = -calc.rough_laplacian +
                    (2.0 * v.dB / v.B) * calc.derivative_along(m, calc.grad_half_norm) +
                    coefficient * calc.value;
  return finish(m, v, calc, std::move(horizontal), std::move(vertical), tol);
}

TensionResult tension(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                      const Vector& p, CalculusPath path) {
  const double tol = path == CalculusPath::kAnalytic ? kAnalyticTolerance : kStencilTolerance;
  return tension(m, spec, field_calculus(m, field, p, path), tol);
}

TensionResult tension_via_connection(const Manifold& m, const KKMetricSpec& spec,
                                     const FieldCalculus& calc, double tol) {
  const Vector& p = calc.point;
  const Vector& e = calc.value;
  const ProfileValues v = checked_profiles(spec, calc.norm_sq);
  const Vector zero = Vector::Zero(p.size());
  Vector horizontal = zero;
  Vector vertical = -calc.rough_laplacian;
  // A geodesic normal frame at p has nabla e_i = 0 there, so only the
  // pointwise parts of the four cases survive.
  for (int i = 0; i < m.dimension(); ++i) {
    const Vector ei = calc.frame.col(i);
    const Vector wi = calc.derivatives.col(i);
    for (const LiftPair& l :
         {connection_eval(spec, m, p, e, LiftCase::kHH, ei, ei, zero),
          connection_eval(spec, m, p, e, LiftCase::kHV, ei, wi, zero),
          connection_eval(spec, m, p, e, LiftCase::kVH, wi, ei, zero),
          connection_eval(spec, m, p, e, LiftCase::kVV, wi, wi, zero)}) {
      horizontal += l.horizontal;
      vertical += l.vertical;
    }
  }
  return finish(m, v, calc, std::move(horizontal), std::move(vertical), tol);
}

Vector constant_curvature_horizontal(const Manifold& m, const KKMetricSpec& spec,
                                     const FieldCalculus& calc) {
  const auto kappa = m.constant_curvature();
  if (!kappa) throw Unsupported(m.describe() + " does not have constant curvature");
  const ProfileValues v = checked_profiles(spec, calc.norm_sq);
  const Vector nabla_sigma_sigma = calc.derivative_along(m, calc.value);
  return -(v.B / v.A) * *kappa * (nabla_sigma_sigma - calc.divergence * calc.value) +
         (2.0 * v.dA / v.A) * calc.grad_half_norm;
}

double constant_norm_condition(const ScalarProfile& b, double k) {
  if (!(k > 0.0)) throw InvalidInput("constant norm must be positive");
  const double t = k * k;
  return b.value(t) + t * b.derivative(t);
}

Vector unit_section_residual(const Manifold& m, const FieldCalculus& calc) {
  if (std::abs(calc.norm_sq - 1.0) > 2e-9) {
    throw InvalidInput("unit_section_residual needs a unit field (|sigma|^2 = " +
                       std::to_string(calc.norm_sq) + ")");
  }
  (void)m;
  return calc.rough_laplacian - calc.jacobian_norm_sq * calc.value;
}

Vector unit_section_residual(const Manifold& m, const FieldSpec& field, const Vector& p,
                             CalculusPath path) {
  return unit_section_residual(m, field_calculus(m, field, p, path));
}

double surface_identity_residual(const Manifold& m, const FieldSpec& field, const Vector& p) {
  if (!m.is_surface()) throw Unsupported("surface identity needs a 2-dimensional base");
  const FieldSpec unit = FieldSpec::normalized(field);
  const VectorFieldFn w = [&](const Vector& q) {
    const FieldCalculus c = field_calculus(m, unit, m.normalize_point(q));
    return Vector(c.divergence * c.value - c.derivative_along(m, c.value));
  };
  return divergence(m, w, p) + m.gaussian_curvature(p);
}

double yano_integrand(const Manifold& m, const FieldCalculus& calc) {
  const Vector& p = calc.point;
  return m.inner(p, calc.rough_laplacian, calc.value) - m.ricci(p, calc.value, calc.value) -
         0.5 * calc.lie_norm_sq + calc.divergence * calc.divergence;
}

std::map<std::string, IdentityResidual> identity_checks(const Manifold& m,
                                                        const KKMetricSpec& spec,
                                                        const FieldSpec& field, const Vector& p) {
  std::map<std::string, IdentityResidual> out;
  const FieldCalculus calc = field_calculus(m, field, p);
  const TensionResult tau = tension(m, spec, calc);
  const ProfileValues v = checked_profiles(spec, calc.norm_sq);
  const double t = calc.norm_sq;

  {
    const double lap = scalar_laplacian(
        m, [&](const Vector& q) { return 0.5 * m.norm_sq(q, evaluate(m, field, q)); }, p);
    const double x_sq = m.norm_sq(p, calc.grad_half_norm);
    const double rhs = (-(v.B + t * v.dB) * calc.jacobian_norm_sq + (2.0 * v.dB + t * v.dC) * x_sq -
                        m.dimension() * v.dA * t) /
                       v.radial();
    const double lhs = lap + m.inner(p, tau.vertical, calc.value);
    out["laplacian_norm"] = {true, std::abs(lhs - rhs), ""};
  }

  if (!m.is_surface()) {
    out["surface"] = {false, 0.0, "base is not a surface"};
  } else if (std::sqrt(t) < kNormalizationFloor) {
    out["surface"] = {false, 0.0, "field vanishes at the point"};
  } else {
    try {
      out["surface"] = {true, std::abs(surface_identity_residual(m, field, p)), ""};
    } catch (const DomainError& e) {
      out["surface"] = {false, 0.0, std::string("frame undefined nearby: ") + e.what()};
    }
  }

  if (m.constant_curvature()) {
    const Vector diff = tau.horizontal - constant_curvature_horizontal(m, spec, calc);
    out["constant_curvature_horizontal"] = {true, std::sqrt(m.norm_sq(p, diff)), ""};
  } else {
    out["constant_curvature_horizontal"] = {false, 0.0, "curvature is not constant"};
  }

  {
    const TensionResult other = tension_via_connection(m, spec, calc);
    const Vector dh = tau.horizontal - other.horizontal;
    const Vector dv = tau.vertical - other.vertical;
    const double along = m.inner(p, dv, calc.value);
    const double g2 = v.A * m.norm_sq(p, dh) + v.B * m.norm_sq(p, dv) + v.C * along * along;
    out["connection_route"] = {true, std::sqrt(std::max(0.0, g2)), ""};
  }
  return out;
}

ResidualReport residual_report(const Manifold& m, const KKMetricSpec& spec,
                               const FieldSpec& field, const std::vector<Vector>& points,
                               double tol, CalculusPath path) {
  ResidualReport r;
  r.field_id = field.id();
  r.metric_id = spec.name;
  r.samples = static_cast<int>(points.size());
  r.tolerance = tol;
  for (const Vector& p : points) {
    const TensionResult t = tension(m, spec, field_calculus(m, field, p, path), tol);
    r.max_norm_G = std::max(r.max_norm_G, t.norm_G);
    r.max_horizontal = std::max(r.max_horizontal, t.horizontal_norm);
    r.max_vertical = std::max(r.max_vertical, t.vertical_norm);
    r.max_unit = std::max(r.max_unit, t.unit_norm);
    r.mean_norm_G += t.norm_G;
    r.mean_horizontal += t.horizontal_norm;
    r.mean_vertical += t.vertical_norm;
    r.mean_unit += t.unit_norm;
  }
  if (!points.empty()) {
    const double n = static_cast<double>(points.size());
    r.mean_norm_G /= n;
    r.mean_horizontal /= n;
    r.mean_vertical /= n;
    r.mean_unit /= n;
  }
  if (r.max_norm_G < tol) {
    r.verdict = "harmonic map";
  } else if (r.max_vertical < tol) {
    r.verdict = "harmonic section";
  } else if (r.max_unit < tol) {
    r.verdict = "unit harmonic section";
  } else {
    r.verdict = "not harmonic";
  }
  return r;
}

}  // namespace kkharm
