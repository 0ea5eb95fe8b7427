#include "kkharm/metric/koszul.hpp"

#include <algorithm>
#include <cmath>

#include "kkharm/util/random.hpp"

namespace kkharm {
namespace {

constexpr double kStep = 1e-3;

// Base field x -> P_x(L x) and its covariant derivative.
struct BaseField {
  Matrix l;
  Vector at(const Vector& x) const {
    const Vector lx = l * x;
    return lx - x.dot(lx) * x;
  }
  Vector nabla(const Vector& x, const Vector& v) const {
    const Vector lx = l * x;
    Vector d = l * v - (v.dot(lx) + x.dot(l * v)) * x - x.dot(lx) * v;
    return d - x.dot(d) * x;
  }
};

// The lift field a^h + b^v.
struct LiftField {
  BaseField a, b;
};

struct Setting {
  const KKMetricSpec& spec;
  const Manifold& m;
  int dim;  // n + 1
};

std::pair<Vector, Vector> split(const Vector& q, int dim) {
  return {q.head(dim), q.tail(dim)};
}

// Projection of R^{2(n+1)} onto TS^n.
Vector project(const Vector& q, int dim) {
  auto [x, e] = split(q, dim);
  x /= x.norm();
  e -= x.dot(e) * x;
  Vector out(2 * dim);
  out << x, e;
  return out;
}

Vector ambient(const Vector& x, const Vector& e, const Vector& h, const Vector& v) {
  Vector out(2 * x.size());
  out << h, v - e.dot(h) * x;
  return out;
}

Vector ambient(const LiftPair& l) { return ambient(l.point, l.fibre, l.horizontal, l.vertical); }

Vector field_at(const LiftField& f, const Vector& q, int dim) {
  const Vector r = project(q, dim);
  auto [x, e] = split(r, dim);
  return ambient(x, e, f.a.at(x), f.b.at(x));
}

// G of two ambient tangent vectors of TS^n at q (projected first).
double metric(const Setting& s, const Vector& q, const Vector& u, const Vector& w) {
  const Vector r = project(q, s.dim);
  auto [x, e] = split(r, s.dim);
  auto lift = [&](const Vector& z) {
    const Vector h = z.head(s.dim);
    return LiftPair{x, e, h, z.tail(s.dim) + e.dot(h) * x};
  };
  return metric_on_lifts(s.spec, s.m, lift(u), lift(w));
}

LiftPair covariant(const Setting& s, const Vector& x, const Vector& e, const LiftField& u,
                   const LiftField& v) {
  const Vector ua = u.a.at(x), ub = u.b.at(x), va = v.a.at(x), vb = v.b.at(x);
  const Vector zero = Vector::Zero(s.dim);
  LiftPair out{x, e, zero, zero};
  auto add = [&](const LiftPair& l) {
    out.horizontal += l.horizontal;
    out.vertical += l.vertical;
  };
  add(connection_eval(s.spec, s.m, x, e, LiftCase::kHH, ua, va, v.a.nabla(x, ua)));
  add(connection_eval(s.spec, s.m, x, e, LiftCase::kHV, ua, vb, v.b.nabla(x, ua)));
  add(connection_eval(s.spec, s.m, x, e, LiftCase::kVH, ub, va, zero));
  add(connection_eval(s.spec, s.m, x, e, LiftCase::kVV, ub, vb, zero));
  return out;
}

// Evaluates into R so no Eigen expression outlives its operands.
template <class R, class F>
R richardson(const F& f, double h) {
  auto central = [&](double step) -> R { return (f(step) - f(-step)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace

KoszulReport koszul_residuals(const KKMetricSpec& spec, int n, int samples, std::uint64_t seed) {
  const Manifold m = Manifold::sphere(n);
  const int dim = n + 1;
  const Setting s{spec, m, dim};
  Rng rng(seed);
  KoszulReport report;
  report.samples = samples;
  auto random_base = [&] {
    Matrix l(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) l(i, j) = rng.normal();
    }
    return BaseField{l};
  };
  for (int k = 0; k < samples; ++k) {
    const Vector x = rng.unit_vector(dim);
    Vector e = rng.normal_vector(dim);
    e -= x.dot(e) * x;
    e *= rng.uniform(0.2, 1.2) / e.norm();
    Vector q(2 * dim);
    q << x, e;

    const LiftField u{random_base(), random_base()};
    const LiftField v{random_base(), random_base()};
    const LiftField w{random_base(), random_base()};
    const Vector uq = field_at(u, q, dim), vq = field_at(v, q, dim), wq = field_at(w, q, dim);

    const double lhs = richardson<double>(
        [&](double h) {
          const Vector qh = q + h * uq;
          return metric(s, qh, field_at(v, qh, dim), field_at(w, qh, dim));
        },
        kStep);
    const Vector nuv = ambient(covariant(s, x, e, u, v));
    const Vector nuw = ambient(covariant(s, x, e, u, w));
    const double rhs = metric(s, q, nuv, wq) + metric(s, q, vq, nuw);
    report.metric_residual = std::max(report.metric_residual, std::abs(lhs - rhs));

    const Vector dv_u =
        richardson<Vector>([&](double h) { return field_at(v, q + h * uq, dim); }, kStep);
    const Vector du_v =
        richardson<Vector>([&](double h) { return field_at(u, q + h * vq, dim); }, kStep);
    const Vector nvu = ambient(covariant(s, x, e, v, u));
    report.torsion_residual =
        std::max(report.torsion_residual, (nuv - nvu - (dv_u - du_v)).norm());
  }
  return report;
}

}  // namespace kkharm
