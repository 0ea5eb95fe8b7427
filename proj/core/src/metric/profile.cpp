#include "kkharm/metric/profile.hpp"

#include <cmath>
#include <sstream>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

struct Constant final : ScalarProfile::Node {
  double c;
  explicit Constant(double c) : c(c) {}
  double value(double) const override { return c; }
  double derivative(double) const override { return 0.0; }
  std::string describe() const override { return num(c); }
};

struct Exponential final : ScalarProfile::Node {
  double k, rate;
  Exponential(double k, double rate) : k(k), rate(rate) {}
  double value(double t) const override { return k * std::exp(rate * t); }
  double derivative(double t) const override { return k * rate * std::exp(rate * t); }
  std::string describe() const override { return num(k) + "*exp(" + num(rate) + "*t)"; }
};

struct Power final : ScalarProfile::Node {
  double k, base, slope, exponent;
  Power(double k, double base, double slope, double exponent)
      : k(k), base(base), slope(slope), exponent(exponent) {}
  double arg(double t) const {
    const double a = base + slope * t;
    if (!(a > 0.0)) throw DomainError("power profile evaluated where its base is not positive");
    return a;
  }
  double value(double t) const override { return k * std::pow(arg(t), exponent); }
  double derivative(double t) const override {
    return k * exponent * slope * std::pow(arg(t), exponent - 1.0);
  }
  std::string describe() const override {
    return num(k) + "*(" + num(base) + "+" + num(slope) + "*t)^" + num(exponent);
  }
};

struct Linear final : ScalarProfile::Node {
  double c0, c1;
  Linear(double c0, double c1) : c0(c0), c1(c1) {}
  double value(double t) const override { return c0 + c1 * t; }
  double derivative(double) const override { return c1; }
  std::string describe() const override { return num(c0) + "+" + num(c1) + "*t"; }
};

struct Tabulated final : ScalarProfile::Node {
  double t0, step;
  std::vector<double> v, dv;
  Tabulated(double t0, double step, std::vector<double> v, std::vector<double> dv)
      : t0(t0), step(step), v(std::move(v)), dv(std::move(dv)) {}

  // Cell index and local coordinate s in [0, 1].
  std::pair<std::size_t, double> locate(double t) const {
    const double x = (t - t0) / step;
    const double last = static_cast<double>(v.size() - 1);
    if (x < -1e-9 || x > last + 1e-9) throw DomainError("tabulated profile evaluated off its grid");
    const double clamped = std::min(std::max(x, 0.0), last);
    std::size_t i = static_cast<std::size_t>(clamped);
    if (i + 1 >= v.size()) i = v.size() - 2;
    return {i, clamped - static_cast<double>(i)};
  }
  double value(double t) const override {
    const auto [i, s] = locate(t);
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * v[i] + h10 * step * dv[i] + h01 * v[i + 1] + h11 * step * dv[i + 1];
  }
  double derivative(double t) const override {
    const auto [i, s] = locate(t);
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -d00, d11 = 3 * s * s - 2 * s;
    return (d00 * v[i] + d01 * v[i + 1]) / step + d10 * dv[i] + d11 * dv[i + 1];
  }
  std::string describe() const override {
    return "table[" + num(t0) + ":" + num(step) + ":" + num(t0 + step * (v.size() - 1)) + "]";
  }
};

struct Extended final : ScalarProfile::Node {
  ScalarProfile inner;
  double t_join, b0, rate;
  Extended(ScalarProfile inner, double t_join) : inner(std::move(inner)), t_join(t_join) {
    b0 = this->inner.value(t_join);
    if (!(b0 > 0.0)) throw DomainError("cannot extend a profile that is not positive at the join");
    rate = this->inner.derivative(t_join) / b0;
  }
  double value(double t) const override {
    return t <= t_join ? inner.value(t) : b0 * std::exp(rate * (t - t_join));
  }
  double derivative(double t) const override {
    return t <= t_join ? inner.derivative(t) : b0 * rate * std::exp(rate * (t - t_join));
  }
  std::string describe() const override {
    return "extend(" + inner.describe() + "," + num(t_join) + ")";
  }
  void breakpoints(std::vector<double>& out) const override {
    for (double b : inner.breakpoints()) {
      if (b < t_join) out.push_back(b);
    }
    out.push_back(t_join);
  }
};

struct Sum final : ScalarProfile::Node {
  ScalarProfile a, b;
  Sum(ScalarProfile a, ScalarProfile b) : a(std::move(a)), b(std::move(b)) {}
  double value(double t) const override { return a.value(t) + b.value(t); }
  double derivative(double t) const override { return a.derivative(t) + b.derivative(t); }
  std::string describe() const override { return a.describe() + "+" + b.describe(); }
  void breakpoints(std::vector<double>& out) const override {
    for (double x : a.breakpoints()) out.push_back(x);
    for (double x : b.breakpoints()) out.push_back(x);
  }
};

struct Scaled final : ScalarProfile::Node {
  double s;
  ScalarProfile a;
  Scaled(double s, ScalarProfile a) : s(s), a(std::move(a)) {}
  double value(double t) const override { return s * a.value(t); }
  double derivative(double t) const override { return s * a.derivative(t); }
  std::string describe() const override { return num(s) + "*(" + a.describe() + ")"; }
  void breakpoints(std::vector<double>& out) const override {
    for (double x : a.breakpoints()) out.push_back(x);
  }
};

Provenance combine(Provenance a, Provenance b) {
  if (a == Provenance::kOdeConstructed || b == Provenance::kOdeConstructed) {
    return Provenance::kOdeConstructed;
  }
  if (a == Provenance::kClosedForm || b == Provenance::kClosedForm) return Provenance::kClosedForm;
  return Provenance::kConstant;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kConstant: return "constant";
    case Provenance::kClosedForm: return "closed-form";
    case Provenance::kOdeConstructed: return "ode-constructed";
  }
  return "unknown";
}

ScalarProfile::ScalarProfile() : ScalarProfile(std::make_shared<Constant>(0.0), Provenance::kConstant) {}

ScalarProfile::ScalarProfile(std::shared_ptr<const Node> node, Provenance provenance)
    : node_(std::move(node)), provenance_(provenance) {
  if (!node_) throw InvalidInput("profile without expression");
}

ScalarProfile ScalarProfile::constant(double c) {
  return ScalarProfile(std::make_shared<Constant>(c), Provenance::kConstant);
}

ScalarProfile ScalarProfile::exponential(double k, double rate) {
  if (rate == 0.0) return constant(k);
  return ScalarProfile(std::make_shared<Exponential>(k, rate), Provenance::kClosedForm);
}

ScalarProfile ScalarProfile::power(double k, double base, double slope, double exponent) {
  return ScalarProfile(std::make_shared<Power>(k, base, slope, exponent), Provenance::kClosedForm);
}

ScalarProfile ScalarProfile::linear(double c0, double c1) {
  if (c1 == 0.0) return constant(c0);
  return ScalarProfile(std::make_shared<Linear>(c0, c1), Provenance::kClosedForm);
}

ScalarProfile ScalarProfile::tabulated(double t0, double step, std::vector<double> values,
                                       std::vector<double> derivatives) {
  if (values.size() < 2 || values.size() != derivatives.size() || !(step > 0.0)) {
    throw InvalidInput("tabulated profile needs >= 2 nodes with matching derivatives");
  }
  return ScalarProfile(
      std::make_shared<Tabulated>(t0, step, std::move(values), std::move(derivatives)),
      Provenance::kOdeConstructed);
}

ScalarProfile ScalarProfile::extended(const ScalarProfile& inner, double t_join) {
  return ScalarProfile(std::make_shared<Extended>(inner, t_join), inner.provenance());
}

std::vector<double> ScalarProfile::breakpoints() const {
  std::vector<double> out;
  node_->breakpoints(out);
  return out;
}

ScalarProfile operator+(const ScalarProfile& a, const ScalarProfile& b) {
  return ScalarProfile(std::make_shared<Sum>(a, b), combine(a.provenance(), b.provenance()));
}

ScalarProfile operator*(double s, const ScalarProfile& a) {
  return ScalarProfile(std::make_shared<Scaled>(s, a), a.provenance());
}

}  // namespace kkharm
