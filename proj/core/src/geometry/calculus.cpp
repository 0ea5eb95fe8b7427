#include "kkharm/geometry/calculus.hpp"

#include <cmath>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

Eigen::Vector2d as2(const Vector& v) { return Eigen::Vector2d(v[0], v[1]); }

// Coordinate matrix T(k, j) = (nabla_{d_j} F)^k on a conformal torus.
Matrix torus_nabla(const Eigen::Vector2d& grad_u, const FieldJet& jet) {
  const Vector& f = jet.value;
  const Vector g = grad_u;
  return jet.jacobian + f * g.transpose() + f.dot(g) * Matrix::Identity(2, 2) - g * f.transpose();
}

// Gamma^k_ij for e^{2u} delta: nabla_{d_i} d_j = Gamma^k_ij d_k.
double gamma(const Eigen::Vector2d& g, int k, int i, int j) {
  return (k == j ? g[i] : 0.0) + (k == i ? g[j] : 0.0) - (i == j ? g[k] : 0.0);
}

// d_i Gamma^k_jl.
double gamma_derivative(const Eigen::Matrix2d& hu, int k, int j, int l, int i) {
  return (k == l ? hu(j, i) : 0.0) + (k == j ? hu(l, i) : 0.0) - (j == l ? hu(k, i) : 0.0);
}

Vector torus_rough_laplacian(const Manifold& m, const Vector& p, const FieldJet& jet) {
  const Potential* pot = m.potential();
  const Eigen::Vector2d q = as2(p);
  if (!pot) {
    Vector lap(2);
    for (int k = 0; k < 2; ++k) lap[k] = -jet.hessian[k].trace();
    return lap;
  }
  const Eigen::Vector2d g = pot->gradient(q);
  const Eigen::Matrix2d hu = pot->hessian(q);
  const Matrix t = torus_nabla(g, jet);
  const Vector& f = jet.value;
  const Matrix& df = jet.jacobian;

  auto dt = [&](int k, int j, int i) {
    double s = jet.hessian[k](i, j);
    for (int l = 0; l < 2; ++l) {
      s += gamma_derivative(hu, k, j, l, i) * f[l] + gamma(g, k, j, l) * df(l, i);
    }
    return s;
  };
  Vector lap = Vector::Zero(2);
  for (int k = 0; k < 2; ++k) {
    double trace = 0.0;
    for (int i = 0; i < 2; ++i) {
      double second = dt(k, i, i);
      for (int mm = 0; mm < 2; ++mm) {
        second += gamma(g, k, i, mm) * t(mm, i) - gamma(g, mm, i, i) * t(k, mm);
      }
      trace += second;
    }
    lap[k] = -std::exp(-2.0 * pot->value(q)) * trace;
  }
  return lap;
}

// Fills every derived entry from point, value, frame, derivatives and rough
// Laplacian.
void complete(const Manifold& m, FieldCalculus& c) {
  const int n = m.dimension();
  c.covariant_jacobian.resize(n, n);
  for (int b = 0; b < n; ++b) {
    c.covariant_jacobian.col(b) = m.frame_coefficients(c.point, c.derivatives.col(b));
  }
  const Matrix& j = c.covariant_jacobian;
  const Vector s = m.frame_coefficients(c.point, c.value);
  c.grad_half_norm = c.frame * (j.transpose() * s);
  c.jacobian_norm_sq = j.squaredNorm();
  c.divergence = j.trace();
  c.lie_norm_sq = (j + j.transpose()).squaredNorm();
  c.norm_sq = m.norm_sq(c.point, c.value);
}

// Field components in the frame transported from p to exp_p(v).
Vector transported_components(const Manifold& m, const VectorFieldFn& field, const Vector& p,
                              const Vector& v, const Matrix& frame) {
  const GeodesicSample g = m.geodesic(p, v, frame);
  const Vector value = field(g.point);
  Vector c(frame.cols());
  for (int a = 0; a < frame.cols(); ++a) c[a] = m.inner(g.point, value, g.transported.col(a));
  return c;
}

Matrix stencil_jacobian(const Manifold& m, const VectorFieldFn& field, const Vector& p,
                        const Matrix& frame, double big_h) {
  const int n = static_cast<int>(frame.cols());
  Matrix j(n, n);
  for (int i = 0; i < n; ++i) {
    const Vector e = frame.col(i);
    auto central = [&](double step) {
      return Vector((transported_components(m, field, p, step * e, frame) -
                     transported_components(m, field, p, -step * e, frame)) /
                    (2.0 * step));
    };
    j.col(i) = (4.0 * central(0.5 * big_h) - central(big_h)) / 3.0;
  }
  return j;
}

}  // namespace

Vector FieldCalculus::derivative_along(const Manifold& m, const Vector& x) const {
  return derivatives * m.frame_coefficients(point, x);
}

FieldCalculus assemble_calculus(const Manifold& m, const Vector& p, Vector value,
                                Matrix derivatives, Vector rough_laplacian) {
  FieldCalculus c;
  c.point = p;
  c.frame = m.frame(p);
  c.value = std::move(value);
  c.derivatives = std::move(derivatives);
  c.rough_laplacian = std::move(rough_laplacian);
  complete(m, c);
  return c;
}

FieldCalculus calculus_from_jet(const Manifold& m, const Vector& p, const FieldJet& jet) {
  const int n = m.dimension();
  FieldCalculus c;
  c.point = p;
  c.frame = m.frame(p);
  if (m.is_sphere()) {
    const int big_n = m.ambient_dim();
    const Matrix proj = Matrix::Identity(big_n, big_n) - p * p.transpose();
    c.value = proj * jet.value;
    c.derivatives = proj * jet.jacobian * c.frame;
    Vector second = Vector::Zero(big_n);
    for (int k = 0; k < big_n; ++k) {
      for (int i = 0; i < n; ++i) {
        second[k] += c.frame.col(i).dot(jet.hessian[k] * c.frame.col(i));
      }
    }
    c.rough_laplacian =
        proj * (-second + n * (jet.jacobian * p) + jet.jacobian.transpose() * p);
  } else {
    const Potential* pot = m.potential();
    const Eigen::Vector2d g = pot ? pot->gradient(as2(p)) : Eigen::Vector2d::Zero();
    c.value = jet.value;
    c.derivatives = torus_nabla(g, jet) * c.frame;
    c.rough_laplacian = torus_rough_laplacian(m, p, jet);
  }
  complete(m, c);
  return c;
}

FieldCalculus stencil_calculus(const Manifold& m, const VectorFieldFn& field, const Vector& p,
                               double h) {
  m.require_point(p);
  const int n = m.dimension();
  FieldCalculus c;
  c.point = p;
  c.frame = m.frame(p);
  c.value = field(p);
  const Matrix j = stencil_jacobian(m, field, p, c.frame, 10.0 * h);
  c.derivatives = c.frame * j;

  const Vector center = m.frame_coefficients(p, c.value);
  Vector lap = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const Vector e = c.frame.col(i);
    const Vector plus = transported_components(m, field, p, h * e, c.frame);
    const Vector minus = transported_components(m, field, p, -h * e, c.frame);
    lap -= (plus - 2.0 * center + minus) / (h * h);
  }
  c.rough_laplacian = c.frame * lap;
  complete(m, c);
  return c;
}

FieldCalculus field_calculus(const Manifold& m, const FieldSpec& field, const Vector& p,
                             CalculusPath path) {
  m.require_point(p);
  require_compatible(m, field);
  if (path == CalculusPath::kAnalytic) return calculus_from_jet(m, p, field_jet(m, field, p));
  return stencil_calculus(m, [&](const Vector& q) { return evaluate(m, field, q); }, p);
}

Vector covariant_derivative(const Manifold& m, const FieldSpec& field, const PointTangent& x) {
  m.require_tangent(x.point, x.vector);
  require_compatible(m, field);
  const FieldJet jet = field_jet(m, field, x.point);
  if (m.is_sphere()) {
    const Vector d = jet.jacobian * x.vector;
    return d - x.point.dot(d) * x.point;
  }
  const Potential* pot = m.potential();
  const Eigen::Vector2d g = pot ? pot->gradient(as2(x.point)) : Eigen::Vector2d::Zero();
  return torus_nabla(g, jet) * x.vector;
}

double scalar_laplacian(const Manifold& m, const ScalarFieldFn& f, const Vector& p, double h) {
  m.require_point(p);
  const Matrix frame = m.frame(p);
  const Matrix none(m.ambient_dim(), 0);
  const double center = f(p);
  double sum = 0.0;
  for (int i = 0; i < frame.cols(); ++i) {
    const double plus = f(m.geodesic(p, h * frame.col(i), none).point);
    const double minus = f(m.geodesic(p, -h * frame.col(i), none).point);
    sum += (plus - 2.0 * center + minus) / (h * h);
  }
  return -sum;
}

double divergence(const Manifold& m, const VectorFieldFn& w, const Vector& p, double h) {
  m.require_point(p);
  return stencil_jacobian(m, w, p, m.frame(p), h).trace();
}

}  // namespace kkharm
