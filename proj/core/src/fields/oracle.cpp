#include "kkharm/fields/oracle.hpp"

#include <cmath>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

Matrix rotation_generator(const std::vector<double>& thetas, int dim) {
  Matrix j = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    j(2 * i + 1, 2 * i) = thetas[i];
    j(2 * i, 2 * i + 1) = -thetas[i];
  }
  return j;
}

FieldCalculus killing_oracle(const Manifold& m, const std::vector<double>& thetas,
                             const Vector& x) {
  const int n = m.dimension();
  const Matrix e = m.frame(x);
  const Matrix j = rotation_generator(thetas, m.ambient_dim());
  const Vector xi = j * x;
  // nabla_X xi = J X + <xi, X> x, tangent for tangent X.
  Matrix d = j * e;
  for (int b = 0; b < n; ++b) d.col(b) += xi.dot(e.col(b)) * x;
  FieldCalculus c = assemble_calculus(m, x, xi, d, (n - 1) * xi);
  c.divergence = 0.0;
  c.lie_norm_sq = 0.0;
  return c;
}

// sigma = f xi with f = |xi|^{-1}, from the Killing closed forms.
FieldCalculus normalized_killing_oracle(const Manifold& m, const std::vector<double>& thetas,
                                        const Vector& x) {
  const int n = m.dimension();
  const FieldCalculus k = killing_oracle(m, thetas, x);
  const double phi = k.norm_sq;
  if (!(std::sqrt(phi) >= kNormalizationFloor)) {
    throw DomainError("normalized Killing field evaluated on its invariant axis");
  }
  const double f = 1.0 / std::sqrt(phi);
  const Vector grad_f = -f * f * f * k.grad_half_norm;
  // Positive Laplacian of |xi|^2 is 2(<nabla* nabla xi, xi> - |nabla xi|^2).
  const double lap_phi = 2.0 * ((n - 1) * phi - k.jacobian_norm_sq);
  const double lap_f = -0.5 * std::pow(phi, -1.5) * lap_phi -
                       3.0 * std::pow(phi, -2.5) * k.grad_half_norm.squaredNorm();
  Matrix d = f * k.derivatives;
  for (int b = 0; b < n; ++b) d.col(b) += grad_f.dot(k.frame.col(b)) * k.value;
  const Vector rough =
      f * k.rough_laplacian + lap_f * k.value - 2.0 * k.derivative_along(m, grad_f);
  return assemble_calculus(m, x, f * k.value, d, rough);
}

}  // namespace

AxisInfo axis_info(const std::vector<double>& thetas, int ambient_dim) {
  int active = 0;
  for (double t : thetas) active += (t != 0.0);
  if (2 * active > ambient_dim) throw InvalidInput("more rotation planes than the ambient space holds");
  AxisInfo info;
  info.dim = ambient_dim - 2 * active;
  const int n = ambient_dim - 1;
  if (n % 2 == 0) {
    info.p = n / 2;
    info.k = (info.dim - 1) / 2;
    info.maximal = info.k == info.p - 1;
  } else {
    info.p = (n - 1) / 2;
    info.k = info.dim / 2;
    info.maximal = info.k == info.p;
  }
  return info;
}

FieldCalculus closed_form_oracle(const Manifold& m, const FieldSpec& field, const Vector& x) {
  m.require_point(x);
  require_compatible(m, field);
  const int n = m.dimension();

  if (m.is_torus()) {
    if (m.is_flat() && field.get_if<FieldSpec::ParallelTorus>()) {
      const Vector v = field.get_if<FieldSpec::ParallelTorus>()->v;
      return assemble_calculus(m, x, v, Matrix::Zero(2, 2), Vector::Zero(2));
    }
    throw Unsupported("no closed form for " + field.id() + " on " + m.describe());
  }

  const Matrix e = m.frame(x);
  if (const auto* c = field.get_if<FieldSpec::Conformal>()) {
    const double lambda = c->a.dot(x);
    const Vector sigma = c->a - lambda * x;
    FieldCalculus out = assemble_calculus(m, x, sigma, -lambda * e, sigma);
    out.grad_half_norm = -lambda * sigma;
    out.jacobian_norm_sq = n * lambda * lambda;
    out.divergence = -n * lambda;
    out.lie_norm_sq = 4.0 * n * lambda * lambda;
    out.norm_sq = c->a.squaredNorm() - lambda * lambda;
    return out;
  }
  if (const auto* q = field.get_if<FieldSpec::QuadraticGradient>()) {
    Vector diag(m.ambient_dim());
    int i = 0;
    for (const auto& [value, mult] : q->eigs) {
      for (int r = 0; r < mult; ++r) diag[i++] = value;
    }
    const Vector mx = diag.cwiseProduct(x);
    const double lambda = mx.dot(x);
    const Vector sigma = mx - lambda * x;
    // nabla_X sigma = P(M X) - lambda X.
    Matrix d = diag.asDiagonal() * e;
    for (int b = 0; b < n; ++b) d.col(b) -= x.dot(d.col(b)) * x + lambda * e.col(b);
    FieldCalculus out = assemble_calculus(m, x, sigma, d, (n + 3) * sigma);
    out.divergence = diag.sum() - (n + 1) * lambda;
    out.lie_norm_sq = 4.0 * out.jacobian_norm_sq;
    return out;
  }
  if (const auto* k = field.get_if<FieldSpec::KillingRotation>()) {
    return killing_oracle(m, k->thetas, x);
  }
  if (const auto* nz = field.get_if<FieldSpec::Normalized>()) {
    if (const auto* k = nz->inner->get_if<FieldSpec::KillingRotation>()) {
      return normalized_killing_oracle(m, k->thetas, x);
    }
  }
  if (const auto* s = field.get_if<FieldSpec::Scaled>()) {
    const FieldCalculus inner = closed_form_oracle(m, *s->inner, x);
    return assemble_calculus(m, x, s->factor * inner.value, s->factor * inner.derivatives,
                             s->factor * inner.rough_laplacian);
  }
  throw Unsupported("no closed form for " + field.id() + " on " + m.describe());
}

}  // namespace kkharm
