#include "kkharm/geometry/potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kkharm {

Potential Potential::product_sine(double amplitude) {
  return Potential({TrigTerm{amplitude, 1, 1, 0.0, 0.0}});
}

Potential Potential::sine_x(double amplitude) {
  return Potential({TrigTerm{amplitude, 1, 0, 0.0, std::numbers::pi / 2}});
}

double Potential::value(const Eigen::Vector2d& p) const {
  double u = 0.0;
  for (const auto& t : terms_) {
    u += t.coef * std::sin(t.kx * p.x() + t.phase_x) * std::sin(t.ky * p.y() + t.phase_y);
  }
  return u;
}

Eigen::Vector2d Potential::gradient(const Eigen::Vector2d& p) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& t : terms_) {
    const double ax = t.kx * p.x() + t.phase_x;
    const double ay = t.ky * p.y() + t.phase_y;
    g.x() += t.coef * t.kx * std::cos(ax) * std::sin(ay);
    g.y() += t.coef * t.ky * std::sin(ax) * std::cos(ay);
  }
  return g;
}

Eigen::Matrix2d Potential::hessian(const Eigen::Vector2d& p) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const auto& t : terms_) {
    const double ax = t.kx * p.x() + t.phase_x;
    const double ay = t.ky * p.y() + t.phase_y;
    const double sx = std::sin(ax), cx = std::cos(ax);
    const double sy = std::sin(ay), cy = std::cos(ay);
    h(0, 0) -= t.coef * t.kx * t.kx * sx * sy;
    h(1, 1) -= t.coef * t.ky * t.ky * sx * sy;
    const double mixed = t.coef * t.kx * t.ky * cx * cy;
    h(0, 1) += mixed;
    h(1, 0) += mixed;
  }
  return h;
}

Potential Potential::operator+(const Potential& other) const {
  std::vector<TrigTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return Potential(std::move(all));
}

Potential Potential::operator*(double factor) const {
  std::vector<TrigTerm> scaled = terms_;
  for (auto& t : scaled) t.coef *= factor;
  return Potential(std::move(scaled));
}

std::string Potential::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i) os << " + ";
    os << t.coef << "*sin(" << t.kx << "x+" << t.phase_x << ")*sin(" << t.ky << "y+" << t.phase_y << ")";
  }
  return os.str();
}

}  // namespace kkharm
