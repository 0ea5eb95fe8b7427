#pragma once

#include <memory>
#include <string>
#include <vector>

namespace kkharm {

enum class Provenance { kConstant, kClosedForm, kOdeConstructed };

std::string to_string(Provenance p);

/// Immutable scalar function of t = |e|^2 >= 0 with its exact derivative.
///
/// Profiles are small expression trees shared by pointer, so copies are cheap
/// and safe to use from several threads.
class ScalarProfile {
 public:
  struct Node {
    virtual ~Node() = default;
    virtual double value(double t) const = 0;
    virtual double derivative(double t) const = 0;
    virtual std::string describe() const = 0;
    /// Points where the second derivative may jump.
    virtual void breakpoints(std::vector<double>&) const {}
  };

  ScalarProfile();  // the constant 0
  ScalarProfile(std::shared_ptr<const Node> node, Provenance provenance);

  static ScalarProfile constant(double c);
  /// k * exp(rate * t)
  static ScalarProfile exponential(double k, double rate);
  /// k * (base + slope * t)^exponent. Throws DomainError where base + slope*t <= 0.
  static ScalarProfile power(double k, double base, double slope, double exponent);
  /// c0 + c1 * t
  static ScalarProfile linear(double c0, double c1);
  /// Piecewise cubic Hermite interpolant through (t_i, v_i, dv_i) on a
  /// uniform grid starting at t_0. Throws DomainError outside the grid.
  static ScalarProfile tabulated(double t0, double step, std::vector<double> values,
                                 std::vector<double> derivatives);
  /// Equal to inner on [0, t_join]; beyond, the C^1 exponential continuation
  /// inner(t_join) * exp((inner'/inner)(t_join) * (t - t_join)), which stays
  /// positive. Requires inner(t_join) > 0.
  static ScalarProfile extended(const ScalarProfile& inner, double t_join);

  double value(double t) const { return node_->value(t); }
  double derivative(double t) const { return node_->derivative(t); }
  double operator()(double t) const { return value(t); }
  std::string describe() const { return node_->describe(); }
  Provenance provenance() const { return provenance_; }
  std::vector<double> breakpoints() const;

  ScalarProfile with_provenance(Provenance p) const { return ScalarProfile(node_, p); }

  friend ScalarProfile operator+(const ScalarProfile& a, const ScalarProfile& b);
  friend ScalarProfile operator*(double s, const ScalarProfile& a);

 private:
  std::shared_ptr<const Node> node_;
  Provenance provenance_ = Provenance::kConstant;
};

}  // namespace kkharm
