#pragma once

#include <optional>
#include <string>
#include <variant>

#include "kkharm/geometry/potential.hpp"
#include "kkharm/util/types.hpp"

namespace kkharm {

/// Unit sphere S^n in R^{n+1}, n >= 2.
struct RoundSphere {
  int n = 2;
};

/// R^2 modulo a rectangular lattice, flat metric.
struct FlatTorus {
  double period_x = 0.0;
  double period_y = 0.0;
};

/// [0, 2pi)^2 with metric e^{2u} (dx^2 + dy^2).
struct ConformalTorus {
  Potential u;
};

/// A point together with a tangent vector there.
///
/// On spheres both are ambient coordinates in R^{n+1}; on tori both are
/// coordinate components in R^2.
struct PointTangent {
  Vector point;
  Vector vector;
};

/// Point on a geodesic together with vectors parallel transported along it.
struct GeodesicSample {
  Vector point;
  Vector velocity;
  Matrix transported;
};

/// Concrete Riemannian manifold with pointwise metric, frames, curvature and
/// geodesic transport.
///
/// Curvature follows R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
/// nabla_[X,Y] Z, so that R(X,Y)Y = X for orthonormal X, Y on the unit sphere.
class Manifold {
 public:
  using Kind = std::variant<RoundSphere, FlatTorus, ConformalTorus>;

  explicit Manifold(Kind kind);

  static Manifold sphere(int n);
  static Manifold flat_torus(double period_x, double period_y);
  static Manifold conformal_torus(Potential u);

  const Kind& kind() const { return kind_; }
  int dimension() const;
  int ambient_dim() const;
  bool is_sphere() const { return std::holds_alternative<RoundSphere>(kind_); }
  bool is_torus() const { return !is_sphere(); }
  bool is_flat() const { return std::holds_alternative<FlatTorus>(kind_); }
  bool is_surface() const { return dimension() == 2; }
  std::string describe() const;

  /// Fundamental domain lengths of a torus.
  Eigen::Vector2d periods() const;
  /// The potential u of a ConformalTorus, nullptr otherwise.
  const Potential* potential() const;
  /// u(p) for a ConformalTorus, 0 otherwise; the metric is e^{2u} times the
  /// ambient (or coordinate) one.
  double log_conformal_factor(const Vector& p) const;

  /// Throws InvalidInput unless p lies on the manifold within 1e-8.
  void require_point(const Vector& p) const;
  /// Throws InvalidInput unless v is tangent at p within 1e-8 (relative).
  void require_tangent(const Vector& p, const Vector& v) const;
  /// Sphere: radial projection. Torus: reduction into the fundamental domain.
  Vector normalize_point(const Vector& p) const;

  /// Orthogonal projection of an ambient vector onto T_pM.
  Vector tangent_project(const Vector& p, const Vector& v) const;

  double inner(const Vector& p, const Vector& x, const Vector& y) const;
  double norm_sq(const Vector& p, const Vector& x) const { return inner(p, x, x); }

  /// Orthonormal frame of T_pM as columns (ambient_dim x dimension).
  ///
  /// Spheres: Gram-Schmidt over the projected ambient basis, each step taking
  /// the candidate with the largest remaining norm (ties to the lower index).
  /// Tori: e^{-u} times the coordinate basis.
  Matrix frame(const Vector& p) const;
  /// Components g(X, e_a) of X in frame(p).
  Vector frame_coefficients(const Vector& p, const Vector& x) const;

  /// Christoffel correction Gamma(X, Y) of a torus, so that
  /// nabla_X Y = DY[X] + Gamma(X, Y) in coordinates. Zero on the flat torus.
  Vector christoffel(const Vector& p, const Vector& x, const Vector& y) const;

  Vector riemann(const Vector& p, const Vector& x, const Vector& y, const Vector& z) const;
  /// Same, checking that all three vectors sit at the same point.
  Vector riemann(const PointTangent& x, const PointTangent& y, const PointTangent& z) const;
  double ricci(const Vector& p, const Vector& x, const Vector& y) const;
  /// Surfaces only; throws Unsupported for n > 2.
  double gaussian_curvature(const Vector& p) const;
  /// Sectional curvature if it is constant (1 on spheres, 0 on flat tori).
  std::optional<double> constant_curvature() const;

  double volume() const { return volume_; }

  /// Geodesic from p with initial velocity v, followed for unit time; the
  /// columns of `vectors` are parallel transported along it.
  GeodesicSample geodesic(const Vector& p, const Vector& v, const Matrix& vectors) const;

 private:
  Kind kind_;
  double volume_ = 0.0;
};

}  // namespace kkharm
