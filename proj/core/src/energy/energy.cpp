#include "kkharm/energy/energy.hpp"

#include <cmath>
#include <numbers>

#include "kkharm/tension/tension.hpp"
#include "kkharm/util/errors.hpp"
#include "kkharm/util/parallel.hpp"

namespace kkharm {
namespace {

// Fourth order central difference of g at 0 from g(+-h), g(+-2h).
template <class G>
double derivative_at_zero(G&& g, double h) {
  return (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h);
}

DualityResult finish(double derivative, double predicted) {
  DualityResult r;
  r.derivative = derivative;
  r.predicted = predicted;
  r.absolute = std::abs(derivative - predicted);
  r.relative = r.absolute / std::max(std::abs(predicted), 1e-12);
  return r;
}

Eigen::Vector2d as2(const Vector& v) { return Eigen::Vector2d(v[0], v[1]); }

void require_torus(const Manifold& m, const char* what) {
  if (!m.is_torus()) throw InvalidInput(std::string(what) + " needs a torus");
}

void require_grid(const Manifold& m, const DiscreteField& f) {
  require_torus(m, "torus grid");
  if (f.resolution < 7) throw InvalidInput("grid resolution must be >= 7");
  if (static_cast<int>(f.values.size()) != f.resolution * f.resolution) {
    throw InvalidInput("grid has " + std::to_string(f.values.size()) + " values, expected " +
                       std::to_string(f.resolution * f.resolution));
  }
  if (!f.periods.isApprox(m.periods(), 1e-12)) throw InvalidInput("grid periods differ from the torus");
}

}  // namespace

int DiscreteField::index(int i, int j) const {
  const int n = resolution;
  return ((i % n + n) % n) * n + ((j % n + n) % n);
}

Vector DiscreteField::point(int i, int j) const {
  Vector p(2);
  p << i * hx(), j * hy();
  return p;
}

DiscreteField DiscreteField::sample(const Manifold& m, const FieldSpec& field, int resolution) {
  require_torus(m, "DiscreteField::sample");
  if (resolution < 5) throw InvalidInput("grid resolution must be >= 5");
  DiscreteField f;
  f.resolution = resolution;
  f.periods = m.periods();
  f.values.resize(resolution * resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      f.values[f.index(i, j)] = as2(evaluate(m, field, f.point(i, j)));
    }
  }
  return f;
}

double DiscreteField::unit_defect(const Manifold& m) const {
  double worst = 0.0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const Vector v = values[index(i, j)];
      worst = std::max(worst, std::abs(std::sqrt(m.inner(point(i, j), v, v)) - 1.0));
    }
  }
  return worst;
}

double energy_density(const Manifold& m, const KKMetricSpec& spec, const FieldCalculus& calc) {
  const ProfileValues v = checked_profiles(spec, calc.norm_sq);
  const double x2 = m.inner(calc.point, calc.grad_half_norm, calc.grad_half_norm);
  return 0.5 * (m.dimension() * v.A + v.B * calc.jacobian_norm_sq + v.C * x2);
}

double energy(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
              const Quadrature& q, CalculusPath path) {
  return integrate(q, [&](const Vector& p) {
    return energy_density(m, spec, field_calculus(m, field, p, path));
  });
}

double section_energy(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                      const Quadrature& q) {
  return integrate(q, [&](const Vector& p) {
    const FieldCalculus c = field_calculus(m, field, p);
    return 0.5 * checked_profiles(spec, c.norm_sq).B * c.jacobian_norm_sq;
  });
}

double discrete_energy(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f) {
  require_grid(m, f);
  const int n = f.resolution;
  const double hx = f.hx(), hy = f.hy();
  const int dim = m.dimension();
  return parallel_sum(static_cast<std::size_t>(n) * n, [&](std::size_t k) {
    const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
    const Vector p = f.point(i, j);
    auto at = [&](int a, int b) { return f.values[f.index(a, b)]; };
    const Eigen::Vector2d s = at(i, j);
    const Eigen::Vector2d dx = (45.0 * (at(i + 1, j) - at(i - 1, j)) - 9.0 * (at(i + 2, j) - at(i - 2, j)) +
                                (at(i + 3, j) - at(i - 3, j))) /
                               (60.0 * hx);
    const Eigen::Vector2d dy = (45.0 * (at(i, j + 1) - at(i, j - 1)) - 9.0 * (at(i, j + 2) - at(i, j - 2)) +
                                (at(i, j + 3) - at(i, j - 3))) /
                               (60.0 * hy);
    Eigen::Vector2d nabla[2] = {dx, dy};
    const double u = m.log_conformal_factor(p);
    const double e2u = std::exp(2.0 * u);
    if (m.potential()) {
      for (int a = 0; a < 2; ++a) {
        Vector ea = Vector::Zero(2);
        ea[a] = 1.0;
        nabla[a] += as2(m.christoffel(p, ea, Vector(s)));
      }
    }
    double jac = 0.0, x2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      jac += nabla[a].squaredNorm();
      const double xa = std::exp(u) * nabla[a].dot(s);
      x2 += xa * xa;
    }
    const ProfileValues v = checked_profiles(spec, e2u * s.squaredNorm());
    return hx * hy * e2u * 0.5 * (dim * v.A + v.B * jac + v.C * x2);
  });
}

DualityResult section_variation_duality(const Manifold& m, const KKMetricSpec& spec,
                                        const FieldSpec& field, const FieldSpec& variation,
                                        const Quadrature& q, double h) {
  std::vector<FieldJet> js(q.size()), jv(q.size());
  parallel_for(q.size(), [&](std::size_t k) {
    js[k] = field_jet(m, field, q.nodes[k]);
    jv[k] = field_jet(m, variation, q.nodes[k]);
  });
  auto e = [&](double t) {
    return parallel_sum(q.size(), [&](std::size_t k) {
      return q.weights[k] * energy_density(m, spec, calculus_from_jet(m, q.nodes[k], js[k] + t * jv[k]));
    });
  };
  const double derivative = derivative_at_zero(e, h);
  const double predicted = -parallel_sum(q.size(), [&](std::size_t k) {
    const Vector& p = q.nodes[k];
    const FieldCalculus c = calculus_from_jet(m, p, js[k]);
    const TensionResult tau = tension(m, spec, c);
    const ProfileValues v = checked_profiles(spec, c.norm_sq);
    const Vector& w = jv[k].value;
    return q.weights[k] * (v.B * m.inner(p, tau.vertical, w) +
                           v.C * m.inner(p, tau.vertical, c.value) * m.inner(p, c.value, w));
  });
  return finish(derivative, predicted);
}

DualityResult map_variation_duality(const Manifold& m, const KKMetricSpec& spec,
                                    const FieldSpec& field, const FieldSpec& direction,
                                    const Quadrature& q, double h) {
  if (!m.is_sphere()) throw Unsupported("map_variation_duality is implemented on spheres");
  constexpr double kDelta = 1e-3;
  // phi_t(x) = (exp_x(t W), transported sigma(x)).
  auto phi = [&](const Vector& x, double t) {
    Matrix s(x.size(), 1);
    s.col(0) = evaluate(m, field, x);
    const GeodesicSample g = m.geodesic(x, t * evaluate(m, direction, x), s);
    return std::pair<Vector, Vector>(g.point, g.transported.col(0));
  };
  auto density = [&](const Vector& x, double t) {
    const Matrix frame = m.frame(x);
    const auto [y, f] = phi(x, t);
    const ProfileValues v = checked_profiles(spec, f.squaredNorm());
    double sum = 0.0;
    for (int a = 0; a < frame.cols(); ++a) {
      auto moved = [&](double s) { return phi(m.geodesic(x, s * frame.col(a), Matrix()).point, t); };
      const auto p1 = moved(kDelta);
      const auto m1 = moved(-kDelta);
      const auto p2 = moved(2 * kDelta);
      const auto m2 = moved(-2 * kDelta);
      const Vector dy = (8.0 * (p1.first - m1.first) - (p2.first - m2.first)) / (12.0 * kDelta);
      const Vector df = (8.0 * (p1.second - m1.second) - (p2.second - m2.second)) / (12.0 * kDelta);
      const Vector vert = df + f.dot(dy) * y;
      const double fv = vert.dot(f);
      sum += v.A * dy.squaredNorm() + v.B * vert.squaredNorm() + v.C * fv * fv;
    }
    return 0.5 * sum;
  };
  auto e = [&](double t) {
    return parallel_sum(q.size(), [&](std::size_t k) { return q.weights[k] * density(q.nodes[k], t); });
  };
  const double derivative = derivative_at_zero(e, h);
  const double predicted = -parallel_sum(q.size(), [&](std::size_t k) {
    const Vector& p = q.nodes[k];
    const FieldCalculus c = field_calculus(m, field, p);
    const TensionResult tau = tension(m, spec, c);
    const ProfileValues v = checked_profiles(spec, c.norm_sq);
    return q.weights[k] * v.A * m.inner(p, tau.horizontal, evaluate(m, direction, p));
  });
  return finish(derivative, predicted);
}

DualityResult torus_duality(const Manifold& m, const KKMetricSpec& spec, const FieldSpec& field,
                            const DiscreteField& variation, double h) {
  require_grid(m, variation);
  const DiscreteField base = DiscreteField::sample(m, field, variation.resolution);
  auto e = [&](double t) {
    DiscreteField f = base;
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] += t * variation.values[k];
    return discrete_energy(m, spec, f);
  };
  const double derivative = derivative_at_zero(e, h);
  const Quadrature q = torus_quadrature(m, variation.resolution);
  const double predicted = -parallel_sum(q.size(), [&](std::size_t k) {
    const Vector& p = q.nodes[k];
    const FieldCalculus c = field_calculus(m, field, p);
    const TensionResult tau = tension(m, spec, c);
    const ProfileValues v = checked_profiles(spec, c.norm_sq);
    const Vector w = variation.values[k];
    return q.weights[k] * (v.B * m.inner(p, tau.vertical, w) +
                           v.C * m.inner(p, tau.vertical, c.value) * m.inner(p, c.value, w));
  });
  return finish(derivative, predicted);
}

Manifold ConformalChange::target(const Manifold& base) const {
  require_torus(base, "ConformalChange");
  if (!base.periods().isApprox(Eigen::Vector2d(2.0 * std::numbers::pi, 2.0 * std::numbers::pi), 1e-12)) {
    throw InvalidInput("conformal changes need a torus with periods 2pi x 2pi");
  }
  const Potential* u0 = base.potential();
  return Manifold::conformal_torus(u0 ? *u0 + u : u);
}

FieldJet ConformalChange::transform(const Manifold& base, const FieldJet& jet,
                                    const Vector& p) const {
  require_torus(base, "ConformalChange");
  const Eigen::Vector2d x = as2(p);
  const double f = std::exp(exponent * u.value(x));
  const Eigen::Vector2d df = exponent * f * u.gradient(x);
  const Eigen::Matrix2d ddf =
      f * (exponent * exponent * u.gradient(x) * u.gradient(x).transpose() + exponent * u.hessian(x));
  FieldJet out;
  out.value = f * jet.value;
  out.jacobian = f * jet.jacobian + jet.value * df.transpose();
  out.hessian.resize(jet.hessian.size());
  for (std::size_t k = 0; k < jet.hessian.size(); ++k) {
    const Eigen::Vector2d jk = jet.jacobian.row(k).transpose();
    out.hessian[k] = f * jet.hessian[k] + df * jk.transpose() + jk * df.transpose() + jet.value[k] * ddf;
  }
  return out;
}

EnergyDelta conformal_energy_delta(const Manifold& m, const ConformalChange& change,
                                   const FieldSpec& field, const KKMetricSpec& spec,
                                   int resolution) {
  const Manifold target = change.target(m);
  const Quadrature before_q = torus_quadrature(m, resolution);
  const Quadrature after_q = torus_quadrature(target, resolution);
  const double b1 = checked_profiles(spec, 1.0).B;

  std::vector<double> before(before_q.size()), after(after_q.size());
  parallel_for(before_q.size(), [&](std::size_t k) {
    const Vector& p = before_q.nodes[k];
    const FieldJet jet = field_jet(m, field, p);
    const FieldCalculus c = calculus_from_jet(m, p, jet);
    if (std::abs(c.norm_sq - 1.0) > 1e-9) {
      throw InvalidInput("conformal_energy_delta needs a unit field; |sigma|^2 = " +
                         std::to_string(c.norm_sq));
    }
    const FieldCalculus ct = calculus_from_jet(target, p, change.transform(m, jet, p));
    if (std::abs(ct.norm_sq - c.norm_sq) > 1e-12) {
      throw InvalidInput("exponent " + std::to_string(change.exponent) +
                         " does not keep the section unit under the conformal change");
    }
    before[k] = before_q.weights[k] * 0.5 * checked_profiles(spec, c.norm_sq).B * c.jacobian_norm_sq;
    after[k] = after_q.weights[k] * 0.5 * checked_profiles(spec, ct.norm_sq).B * ct.jacobian_norm_sq;
  });
  EnergyDelta d;
  for (double v : before) d.before += v;
  for (double v : after) d.after += v;
  d.measured = d.after - d.before;

  // |grad u|^2 v_g and K_g v_g are both computed in flat coordinates.
  const Potential* u0 = m.potential();
  const double cell = (2.0 * std::numbers::pi / resolution) * (2.0 * std::numbers::pi / resolution);
  double grad = 0.0, curv = 0.0;
  for (const Vector& p : before_q.nodes) {
    const Eigen::Vector2d x = as2(p);
    grad += cell * change.u.gradient(x).squaredNorm();
    if (u0) curv += cell * change.u.value(x) * (-u0->flat_laplacian(x));
  }
  d.predicted = 0.5 * b1 * (grad + 2.0 * curv);
  return d;
}

double yano_integral(const Manifold& m, const FieldSpec& field, const Quadrature& q,
                     CalculusPath path) {
  return integrate(q, [&](const Vector& p) { return yano_integrand(m, field_calculus(m, field, p, path)); });
}

}  // namespace kkharm
