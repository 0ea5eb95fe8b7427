#include "kkharm/geometry/manifold.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

constexpr double kPointTolerance = 1e-8;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::Vector2d as2(const Vector& v) { return Eigen::Vector2d(v[0], v[1]); }

double sphere_volume(int n) {
  const double half = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

// Trapezoid rule is spectrally accurate for the smooth periodic e^{2u}.
double conformal_volume(const Potential& u) {
  constexpr int kN = 256;
  const double h = kTwoPi / kN;
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      sum += std::exp(2.0 * u.value(Eigen::Vector2d(i * h, j * h)));
    }
  }
  return sum * h * h;
}

// Gamma(X, Y) for the metric e^{2u} delta.
Eigen::Vector2d conformal_gamma(const Eigen::Vector2d& grad_u, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& y) {
  return x.dot(grad_u) * y + y.dot(grad_u) * x - x.dot(y) * grad_u;
}

}  // namespace

Manifold::Manifold(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [this](const RoundSphere& s) {
                   if (s.n < 2) throw InvalidInput("sphere dimension must be >= 2");
                   volume_ = sphere_volume(s.n);
                 },
                 [this](const FlatTorus& t) {
                   if (!(t.period_x > 0.0) || !(t.period_y > 0.0)) {
                     throw InvalidInput("torus periods must be positive");
                   }
                   volume_ = t.period_x * t.period_y;
                 },
                 [this](const ConformalTorus& t) { volume_ = conformal_volume(t.u); },
             },
             kind_);
}

Manifold Manifold::sphere(int n) { return Manifold(RoundSphere{n}); }

Manifold Manifold::flat_torus(double period_x, double period_y) {
  return Manifold(FlatTorus{period_x, period_y});
}

Manifold Manifold::conformal_torus(Potential u) { return Manifold(ConformalTorus{std::move(u)}); }

int Manifold::dimension() const {
  if (const auto* s = std::get_if<RoundSphere>(&kind_)) return s->n;
  return 2;
}

int Manifold::ambient_dim() const {
  if (const auto* s = std::get_if<RoundSphere>(&kind_)) return s->n + 1;
  return 2;
}

std::string Manifold::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const RoundSphere& s) { os << "S^" << s.n; },
                 [&](const FlatTorus& t) { os << "T^2(" << t.period_x << "x" << t.period_y << ")"; },
                 [&](const ConformalTorus& t) { os << "T^2(e^{2u}, u=" << t.u.describe() << ")"; },
             },
             kind_);
  return os.str();
}

Eigen::Vector2d Manifold::periods() const {
  if (const auto* t = std::get_if<FlatTorus>(&kind_)) return {t->period_x, t->period_y};
  if (is_torus()) return {kTwoPi, kTwoPi};
  throw Unsupported("periods() requires a torus");
}

const Potential* Manifold::potential() const {
  if (const auto* t = std::get_if<ConformalTorus>(&kind_)) return &t->u;
  return nullptr;
}

double Manifold::log_conformal_factor(const Vector& p) const {
  const Potential* u = potential();
  return u ? u->value(as2(p)) : 0.0;
}

void Manifold::require_point(const Vector& p) const {
  if (p.size() != ambient_dim()) {
    throw InvalidInput("point has " + std::to_string(p.size()) + " coordinates, expected " +
                       std::to_string(ambient_dim()));
  }
  if (!p.allFinite()) throw InvalidInput("point has non-finite coordinates");
  if (is_sphere() && std::abs(p.norm() - 1.0) > kPointTolerance) {
    throw InvalidInput("point is off the unit sphere (|p| - 1 = " +
                       std::to_string(p.norm() - 1.0) + ")");
  }
}

void Manifold::require_tangent(const Vector& p, const Vector& v) const {
  require_point(p);
  if (v.size() != ambient_dim()) throw InvalidInput("tangent vector has wrong size");
  if (is_sphere() && std::abs(p.dot(v)) > kPointTolerance * std::max(1.0, v.norm())) {
    throw InvalidInput("vector is not tangent to the sphere at the given point");
  }
}

Vector Manifold::normalize_point(const Vector& p) const {
  if (is_sphere()) return p / p.norm();
  const Eigen::Vector2d l = periods();
  Vector q = p;
  for (int i = 0; i < 2; ++i) {
    q[i] = std::fmod(q[i], l[i]);
    if (q[i] < 0.0) q[i] += l[i];
  }
  return q;
}

Vector Manifold::tangent_project(const Vector& p, const Vector& v) const {
  require_point(p);
  if (v.size() != ambient_dim()) throw InvalidInput("vector has wrong size");
  if (is_sphere()) return v - p.dot(v) * p;
  return v;
}

double Manifold::inner(const Vector& p, const Vector& x, const Vector& y) const {
  const double d = x.dot(y);
  if (const Potential* u = potential()) return std::exp(2.0 * u->value(as2(p))) * d;
  return d;
}

Matrix Manifold::frame(const Vector& p) const {
  if (is_torus()) {
    return std::exp(-log_conformal_factor(p)) * Matrix::Identity(2, 2);
  }
  const int big_n = ambient_dim();
  const int n = dimension();
  std::vector<Vector> candidates;
  candidates.reserve(big_n);
  for (int j = 0; j < big_n; ++j) {
    Vector e = Vector::Zero(big_n);
    e[j] = 1.0;
    candidates.push_back(e - p[j] * p);
  }
  std::vector<bool> used(big_n, false);
  Matrix frame(big_n, n);
  for (int a = 0; a < n; ++a) {
    int best = -1;
    double best_norm = -1.0;
    for (int j = 0; j < big_n; ++j) {
      if (used[j]) continue;
      Vector c = candidates[j];
      for (int b = 0; b < a; ++b) c -= frame.col(b).dot(c) * frame.col(b);
      const double nrm = c.norm();
      if (nrm > best_norm + 1e-14) {
        best_norm = nrm;
        best = j;
      }
    }
    Vector c = candidates[best];
    for (int b = 0; b < a; ++b) c -= frame.col(b).dot(c) * frame.col(b);
    // Second pass keeps the frame orthonormal to rounding.
    for (int b = 0; b < a; ++b) c -= frame.col(b).dot(c) * frame.col(b);
    frame.col(a) = c / c.norm();
    used[best] = true;
  }
  return frame;
}

Vector Manifold::frame_coefficients(const Vector& p, const Vector& x) const {
  if (is_torus()) return std::exp(log_conformal_factor(p)) * x;
  return frame(p).transpose() * x;
}

Vector Manifold::christoffel(const Vector& p, const Vector& x, const Vector& y) const {
  if (is_sphere()) throw Unsupported("christoffel() is defined for tori only");
  const Potential* u = potential();
  if (!u) return Vector::Zero(2);
  return conformal_gamma(u->gradient(as2(p)), as2(x), as2(y));
}

Vector Manifold::riemann(const Vector& p, const Vector& x, const Vector& y, const Vector& z) const {
  if (is_flat()) return Vector::Zero(2);
  const double k = is_sphere() ? 1.0 : gaussian_curvature(p);
  return k * (inner(p, y, z) * x - inner(p, x, z) * y);
}

Vector Manifold::riemann(const PointTangent& x, const PointTangent& y, const PointTangent& z) const {
  if (!x.point.isApprox(y.point, 1e-14) || !x.point.isApprox(z.point, 1e-14)) {
    throw InvalidInput("riemann: tangent vectors are based at different points");
  }
  return riemann(x.point, x.vector, y.vector, z.vector);
}

double Manifold::ricci(const Vector& p, const Vector& x, const Vector& y) const {
  if (is_sphere()) return (dimension() - 1) * inner(p, x, y);
  return gaussian_curvature(p) * inner(p, x, y);
}

double Manifold::gaussian_curvature(const Vector& p) const {
  if (dimension() != 2) throw Unsupported("Gaussian curvature is defined for surfaces only");
  if (is_sphere()) return 1.0;
  const Potential* u = potential();
  if (!u) return 0.0;
  const Eigen::Vector2d q = as2(p);
  return -std::exp(-2.0 * u->value(q)) * u->flat_laplacian(q);
}

std::optional<double> Manifold::constant_curvature() const {
  if (is_sphere()) return 1.0;
  if (is_flat()) return 0.0;
  const Potential* u = potential();
  if (u && u->is_zero()) return 0.0;
  return std::nullopt;
}

GeodesicSample Manifold::geodesic(const Vector& p, const Vector& v, const Matrix& vectors) const {
  if (is_sphere()) {
    const double speed = v.norm();
    if (speed == 0.0) return {p, v, vectors};
    const Vector dir = v / speed;
    const double c = std::cos(speed), s = std::sin(speed);
    const Vector end_dir = -s * p + c * dir;
    Matrix moved = vectors;
    for (int j = 0; j < vectors.cols(); ++j) {
      const double along = vectors.col(j).dot(dir);
      moved.col(j) += along * (end_dir - dir);
    }
    return {c * p + s * dir, speed * end_dir, moved};
  }
  const Potential* u = potential();
  if (!u) return {p + v, v, vectors};

  // RK4 on x' = w, w' = -Gamma(w, w), V' = -Gamma(w, V).
  const int cols = static_cast<int>(vectors.cols());
  const int state_size = 4 + 2 * cols;
  auto rhs = [&](const Vector& s) {
    Vector d(state_size);
    const Eigen::Vector2d x(s[0], s[1]);
    const Eigen::Vector2d w(s[2], s[3]);
    const Eigen::Vector2d g = u->gradient(x);
    d.segment<2>(0) = w;
    d.segment<2>(2) = -conformal_gamma(g, w, w);
    for (int j = 0; j < cols; ++j) {
      const Eigen::Vector2d vj(s[4 + 2 * j], s[5 + 2 * j]);
      d.segment<2>(4 + 2 * j) = -conformal_gamma(g, w, vj);
    }
    return d;
  };
  Vector state(state_size);
  state.segment<2>(0) = as2(p);
  state.segment<2>(2) = as2(v);
  for (int j = 0; j < cols; ++j) state.segment<2>(4 + 2 * j) = as2(vectors.col(j));
  const int steps = std::max(4, static_cast<int>(std::ceil(v.norm() / 0.01)));
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = rhs(state);
    const Vector k2 = rhs(state + 0.5 * h * k1);
    const Vector k3 = rhs(state + 0.5 * h * k2);
    const Vector k4 = rhs(state + h * k3);
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Matrix moved(2, cols);
  for (int j = 0; j < cols; ++j) moved.col(j) = state.segment<2>(4 + 2 * j);
  return {state.segment<2>(0), state.segment<2>(2), moved};
}

}  // namespace kkharm
