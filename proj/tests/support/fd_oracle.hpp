#pragma once

// Test-side oracles built only from ambient finite differences and great
// circle transport. Nothing here calls into the library's calculus.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace fd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Field = std::function<Vec(const Vec&)>;

inline Vec project(const Vec& p, const Vec& v) { return v - p.dot(v) * p; }

// Orthonormal basis of p^perp by QR of [p | I].
inline Mat tangent_basis(const Vec& p) {
  const int n = static_cast<int>(p.size());
  Mat a(n, n + 1);
  a.col(0) = p;
  a.rightCols(n) = Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - 1);
}

inline Vec great_circle(const Vec& p, const Vec& e, double s) { return std::cos(s) * p + std::sin(s) * e; }

// Components of sigma(gamma(s)) in the frame (e_1..e_{n}) parallel along the
// great circle through p with unit velocity e_i = basis.col(i).
inline Vec transported_components(const Field& sigma, const Vec& p, const Mat& basis, int i, double s) {
  const Vec e = basis.col(i);
  const Vec q = great_circle(p, e, s);
  const Vec v = sigma(q);
  Vec c(basis.cols());
  for (int j = 0; j < basis.cols(); ++j) {
    const Vec ej = j == i ? Vec(-std::sin(s) * p + std::cos(s) * e) : Vec(basis.col(j));
    c[j] = v.dot(ej);
  }
  return c;
}

// nabla_X sigma on the unit sphere: tangent part of the ambient derivative.
inline Vec sphere_covariant(const Field& sigma, const Vec& p, const Vec& x, double h = 1e-5) {
  const double len = x.norm();
  if (len == 0.0) return Vec::Zero(p.size());
  const Vec e = x / len;
  const Vec d = (sigma(great_circle(p, e, h)) - sigma(great_circle(p, e, -h))) / (2.0 * h);
  return len * project(p, d);
}

// -trace nabla^2 sigma on the unit sphere, by second differences along great
// circles in a parallel frame.
inline Vec sphere_rough_laplacian(const Field& sigma, const Vec& p, double h = 1e-3) {
  const Mat b = tangent_basis(p);
  Vec acc = Vec::Zero(b.cols());
  for (int i = 0; i < b.cols(); ++i) {
    const Vec plus = transported_components(sigma, p, b, i, h);
    const Vec zero = transported_components(sigma, p, b, i, 0.0);
    const Vec minus = transported_components(sigma, p, b, i, -h);
    acc += (plus - 2.0 * zero + minus) / (h * h);
  }
  return -(b * acc);
}

// Positive scalar Laplacian on the unit sphere.
inline double sphere_laplacian(const std::function<double(const Vec&)>& f, const Vec& p, double h = 1e-3) {
  const Mat b = tangent_basis(p);
  double acc = 0.0;
  for (int i = 0; i < b.cols(); ++i) {
    const Vec e = b.col(i);
    acc += (f(great_circle(p, e, h)) - 2.0 * f(p) + f(great_circle(p, e, -h))) / (h * h);
  }
  return -acc;
}

// Flat Laplacian of a function of two variables.
inline double flat_laplacian(const std::function<double(double, double)>& f, double x, double y,
                             double h = 1e-3) {
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
}

// Tension of a sphere field read off the formulas with every derivative by
// finite differences. Profiles are passed as value/derivative callables.
struct Profiles {
  std::function<double(double)> A, dA, B, dB, C, dC;
};

struct Tension {
  Vec horizontal;
  Vec vertical;
};

inline Tension sphere_tension(const Field& sigma, const Profiles& pr, const Vec& p) {
  const int m = static_cast<int>(p.size()) - 1;
  const Mat b = tangent_basis(p);
  const Vec s = sigma(p);
  const double t = s.squaredNorm();
  const double A = pr.A(t), dA = pr.dA(t), B = pr.B(t), dB = pr.dB(t), C = pr.C(t), dC = pr.dC(t);
  Vec x = Vec::Zero(p.size());
  double jac = 0.0;
  Vec h = Vec::Zero(p.size());
  for (int i = 0; i < b.cols(); ++i) {
    const Vec ei = b.col(i);
    const Vec d = sphere_covariant(sigma, p, ei);
    jac += d.squaredNorm();
    x += d.dot(s) * ei;
    // R(U, V)W = <V, W>U - <U, W>V on the unit sphere.
    const Vec r = s.dot(ei) * d - d.dot(ei) * s;
    h -= (B / A) * r;
  }
  h += (2.0 * dA / A) * x;
  const Vec lap = sphere_rough_laplacian(sigma, p);
  const Vec along_x = sphere_covariant(sigma, p, x);
  const double coef = (-m * dA + (dC - 2.0 * dB * C / B) * x.squaredNorm() + (C - dB) * jac) / (B + t * C);
  Tension out;
  out.horizontal = h;
  out.vertical = -lap + (2.0 * dB / B) * along_x + coef * s;
  return out;
}

}  // namespace fd
