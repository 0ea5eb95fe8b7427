#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kkharm {

/// One product term  coef * sin(kx*x + phase_x) * sin(ky*y + phase_y).
/// Integer wave numbers keep the term 2*pi periodic in both variables.
struct TrigTerm {
  double coef = 0.0;
  int kx = 0;
  int ky = 0;
  double phase_x = 0.0;
  double phase_y = 0.0;
};

/// Doubly periodic scalar function on [0, 2pi)^2 given as a finite sum of
/// trigonometric products, with exact derivatives up to second order.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

  /// amplitude * sin(x) * sin(y)
  static Potential product_sine(double amplitude);
  /// amplitude * sin(x), independent of y. The coordinate field d/dy is then
  /// a Killing field of e^{2u}(dx^2 + dy^2).
  static Potential sine_x(double amplitude);

  double value(const Eigen::Vector2d& p) const;
  Eigen::Vector2d gradient(const Eigen::Vector2d& p) const;
  Eigen::Matrix2d hessian(const Eigen::Vector2d& p) const;
  /// Flat (analyst's) Laplacian u_xx + u_yy.
  double flat_laplacian(const Eigen::Vector2d& p) const { return hessian(p).trace(); }

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Potential operator+(const Potential& other) const;
  Potential operator*(double factor) const;

  std::string describe() const;

 private:
  std::vector<TrigTerm> terms_;
};

}  // namespace kkharm
