#include "kkharm/fields/field_spec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string join(const Vector& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

Vector diag_of(const std::vector<std::pair<double, int>>& eigs) {
  int n = 0;
  for (const auto& e : eigs) n += e.second;
  Vector d(n);
  int i = 0;
  for (const auto& [value, mult] : eigs) {
    for (int j = 0; j < mult; ++j) d[i++] = value;
  }
  return d;
}

Matrix killing_matrix(const std::vector<double>& thetas, int dim) {
  Matrix j = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const int a = static_cast<int>(2 * i), b = a + 1;
    j(b, a) = thetas[i];
    j(a, b) = -thetas[i];
  }
  return j;
}

FieldJet conformal_jet(const Vector& a, const Vector& x) {
  const int n = static_cast<int>(x.size());
  const double lambda = a.dot(x);
  FieldJet jet;
  jet.value = a - lambda * x;
  jet.jacobian = -x * a.transpose() - lambda * Matrix::Identity(n, n);
  jet.hessian.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      jet.hessian[k](i, k) -= a[i];
      jet.hessian[k](k, i) -= a[i];
    }
  }
  return jet;
}

FieldJet quadratic_jet(const Vector& d, const Vector& x) {
  const int n = static_cast<int>(x.size());
  const Vector dx = d.cwiseProduct(x);
  const double q = x.dot(dx);
  FieldJet jet;
  jet.value = dx - q * x;
  jet.jacobian = Matrix(d.asDiagonal()) - q * Matrix::Identity(n, n) - 2.0 * x * dx.transpose();
  jet.hessian.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    Matrix& h = jet.hessian[k];
    h.diagonal() -= 2.0 * x[k] * d;
    h.row(k) -= 2.0 * dx.transpose();
    h.col(k) -= 2.0 * dx;
  }
  return jet;
}

FieldJet linear_jet(const Matrix& j, const Vector& x) {
  const int n = static_cast<int>(x.size());
  return FieldJet{j * x, j, std::vector<Matrix>(n, Matrix::Zero(n, n))};
}

FieldJet fourier_jet(const std::vector<FourierMode>& modes, const Eigen::Vector2d& periods,
                     const Vector& p) {
  FieldJet jet = FieldJet::zero(2);
  for (const auto& m : modes) {
    const double wx = m.kx * 2.0 * std::numbers::pi / periods.x();
    const double wy = m.ky * 2.0 * std::numbers::pi / periods.y();
    const double arg = wx * p[0] + wy * p[1] + m.phase;
    const double s = std::sin(arg), c = std::cos(arg);
    const int k = m.component;
    jet.value[k] += m.coef * s;
    jet.jacobian(k, 0) += m.coef * wx * c;
    jet.jacobian(k, 1) += m.coef * wy * c;
    jet.hessian[k](0, 0) -= m.coef * wx * wx * s;
    jet.hessian[k](1, 1) -= m.coef * wy * wy * s;
    jet.hessian[k](0, 1) -= m.coef * wx * wy * s;
    jet.hessian[k](1, 0) -= m.coef * wx * wy * s;
  }
  return jet;
}

// Jet of inner / |inner|_g where |v|_g^2 = w(x) |v|^2 and w = e^{2u}.
FieldJet normalize_jet(const Manifold& m, const FieldJet& f, const Vector& p) {
  const int n = static_cast<int>(p.size());
  double w = 1.0;
  Vector dw = Vector::Zero(n);
  Matrix d2w = Matrix::Zero(n, n);
  if (const Potential* u = m.potential()) {
    const Eigen::Vector2d q(p[0], p[1]);
    const Eigen::Vector2d g = u->gradient(q);
    w = std::exp(2.0 * u->value(q));
    dw = 2.0 * w * g;
    d2w = 2.0 * w * (u->hessian(q) + 2.0 * g * g.transpose());
  }
  const double ff = f.value.squaredNorm();
  const double phi = w * ff;
  if (!(phi >= kNormalizationFloor * kNormalizationFloor)) {
    throw DomainError("normalized field evaluated at a zero of its inner field");
  }
  const Vector jtf = f.jacobian.transpose() * f.value;
  const Vector dphi = dw * ff + 2.0 * w * jtf;
  Matrix d2phi = d2w * ff + 2.0 * (dw * jtf.transpose() + jtf * dw.transpose()) +
                 2.0 * w * f.jacobian.transpose() * f.jacobian;
  for (int k = 0; k < n; ++k) d2phi += 2.0 * w * f.value[k] * f.hessian[k];

  const double r = 1.0 / std::sqrt(phi);
  const double r3 = r * r * r;
  const Vector dr = -0.5 * r3 * dphi;
  const Matrix d2r = 0.75 * r3 * r * r * dphi * dphi.transpose() - 0.5 * r3 * d2phi;

  FieldJet out;
  out.value = r * f.value;
  out.jacobian = r * f.jacobian + f.value * dr.transpose();
  out.hessian.resize(n);
  for (int k = 0; k < n; ++k) {
    const Vector dfk = f.jacobian.row(k).transpose();
    out.hessian[k] = r * f.hessian[k] + dfk * dr.transpose() + dr * dfk.transpose() +
                     f.value[k] * d2r;
  }
  return out;
}

}  // namespace

FieldJet FieldJet::zero(int dim) {
  return FieldJet{Vector::Zero(dim), Matrix::Zero(dim, dim), std::vector<Matrix>(dim, Matrix::Zero(dim, dim))};
}

FieldJet& FieldJet::operator+=(const FieldJet& other) {
  value += other.value;
  jacobian += other.jacobian;
  for (std::size_t k = 0; k < hessian.size(); ++k) hessian[k] += other.hessian[k];
  return *this;
}

FieldJet& FieldJet::operator*=(double factor) {
  value *= factor;
  jacobian *= factor;
  for (auto& h : hessian) h *= factor;
  return *this;
}

FieldSpec::FieldSpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const Conformal& c) {
                   if (c.a.size() < 3 || c.a.norm() == 0.0) {
                     throw InvalidInput("conformal field needs a nonzero vector a in R^{n+1}, n >= 2");
                   }
                 },
                 [](const QuadraticGradient& q) {
                   if (q.eigs.empty()) throw InvalidInput("quadratic field needs eigenvalues");
                   for (const auto& e : q.eigs) {
                     if (e.second <= 0) throw InvalidInput("eigenvalue multiplicities must be positive");
                   }
                 },
                 [](const KillingRotation& k) {
                   if (k.thetas.empty()) throw InvalidInput("Killing rotation needs at least one speed");
                   bool seen_zero = false;
                   for (double t : k.thetas) {
                     if (t == 0.0) seen_zero = true;
                     else if (seen_zero) throw InvalidInput("nonzero rotation speeds must be listed first");
                   }
                 },
                 [](const ParallelTorus& p) {
                   if (p.v.size() != 2) throw InvalidInput("torus field needs two components");
                 },
                 [](const Fourier& f) {
                   for (const auto& m : f.modes) {
                     if (m.component < 0 || m.component > 1) {
                       throw InvalidInput("Fourier mode component must be 0 or 1");
                     }
                   }
                 },
                 [](const Normalized& n) {
                   if (!n.inner) throw InvalidInput("normalized field without inner field");
                 },
                 [](const Scaled& s) {
                   if (!s.inner) throw InvalidInput("scaled field without inner field");
                 },
             },
             kind_);
}

FieldSpec FieldSpec::conformal(Vector a) { return FieldSpec(Conformal{std::move(a)}); }

FieldSpec FieldSpec::quadratic(std::vector<std::pair<double, int>> eigs) {
  return FieldSpec(QuadraticGradient{std::move(eigs)});
}

FieldSpec FieldSpec::quadratic_from_matrix(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw InvalidInput("quadratic form must be square");
  if (!symmetric.isApprox(symmetric.transpose(), 1e-12)) {
    throw InvalidInput("quadratic form must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  const Vector values = solver.eigenvalues();  // ascending
  std::vector<std::pair<double, int>> eigs;
  for (int i = values.size() - 1; i >= 0; --i) {
    if (!eigs.empty() && std::abs(eigs.back().first - values[i]) < 1e-10) {
      ++eigs.back().second;
    } else {
      eigs.emplace_back(values[i], 1);
    }
  }
  return quadratic(std::move(eigs));
}

FieldSpec FieldSpec::killing(std::vector<double> thetas) {
  return FieldSpec(KillingRotation{std::move(thetas)});
}

FieldSpec FieldSpec::parallel(Vector v) { return FieldSpec(ParallelTorus{std::move(v)}); }

FieldSpec FieldSpec::fourier(std::vector<FourierMode> modes) {
  return FieldSpec(Fourier{std::move(modes)});
}

FieldSpec FieldSpec::normalized(FieldSpec inner) {
  return FieldSpec(Normalized{std::make_shared<const FieldSpec>(std::move(inner))});
}

FieldSpec FieldSpec::scaled(FieldSpec inner, double factor) {
  return FieldSpec(Scaled{std::make_shared<const FieldSpec>(std::move(inner)), factor});
}

int FieldSpec::distinct_eigenvalues() const {
  const auto* q = get_if<QuadraticGradient>();
  if (!q) throw Unsupported("distinct_eigenvalues() requires a quadratic field");
  std::vector<double> values;
  for (const auto& e : q->eigs) values.push_back(e.first);
  std::sort(values.begin(), values.end());
  int count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == 0 || values[i] - values[i - 1] > 1e-10) ++count;
  }
  return count;
}

std::string FieldSpec::id() const {
  return std::visit(
      Overloaded{
          [](const Conformal& c) { return "conformal(" + join(c.a) + ")"; },
          [](const QuadraticGradient& q) {
            std::string s = "quadratic(";
            for (std::size_t i = 0; i < q.eigs.size(); ++i) {
              s += (i ? "," : "") + fmt(q.eigs[i].first) + "^" + std::to_string(q.eigs[i].second);
            }
            return s + ")";
          },
          [](const KillingRotation& k) {
            std::string s = "killing(";
            for (std::size_t i = 0; i < k.thetas.size(); ++i) s += (i ? "," : "") + fmt(k.thetas[i]);
            return s + ")";
          },
          [](const ParallelTorus& p) { return "parallel(" + join(p.v) + ")"; },
          [](const Fourier& f) {
            std::string s = "fourier(";
            for (std::size_t i = 0; i < f.modes.size(); ++i) {
              const auto& m = f.modes[i];
              s += (i ? ";" : "") + std::to_string(m.component) + ":" + fmt(m.coef) + "@" +
                   std::to_string(m.kx) + "," + std::to_string(m.ky) + "+" + fmt(m.phase);
            }
            return s + ")";
          },
          [](const Normalized& n) { return "normalized(" + n.inner->id() + ")"; },
          [](const Scaled& s) { return "scaled(" + fmt(s.factor) + "," + s.inner->id() + ")"; },
      },
      kind_);
}

void require_compatible(const Manifold& m, const FieldSpec& field) {
  const int big_n = m.ambient_dim();
  std::visit(Overloaded{
                 [&](const FieldSpec::Conformal& c) {
                   if (!m.is_sphere() || c.a.size() != big_n) {
                     throw InvalidInput("conformal field " + field.id() + " does not fit " + m.describe());
                   }
                 },
                 [&](const FieldSpec::QuadraticGradient& q) {
                   int total = 0;
                   for (const auto& e : q.eigs) total += e.second;
                   if (!m.is_sphere() || total != big_n) {
                     throw InvalidInput("quadratic field multiplicities must sum to n+1 on " + m.describe());
                   }
                 },
                 [&](const FieldSpec::KillingRotation& k) {
                   if (!m.is_sphere() || 2 * static_cast<int>(k.thetas.size()) > big_n) {
                     throw InvalidInput("Killing rotation " + field.id() + " does not fit " + m.describe());
                   }
                 },
                 [&](const FieldSpec::ParallelTorus&) {
                   if (!m.is_torus()) throw InvalidInput("parallel field requires a torus");
                 },
                 [&](const FieldSpec::Fourier&) {
                   if (!m.is_torus()) throw InvalidInput("Fourier field requires a torus");
                 },
                 [&](const FieldSpec::Normalized& n) { require_compatible(m, *n.inner); },
                 [&](const FieldSpec::Scaled& s) { require_compatible(m, *s.inner); },
             },
             field.kind());
}

FieldJet field_jet(const Manifold& m, const FieldSpec& field, const Vector& p) {
  return std::visit(
      Overloaded{
          [&](const FieldSpec::Conformal& c) { return conformal_jet(c.a, p); },
          [&](const FieldSpec::QuadraticGradient& q) { return quadratic_jet(diag_of(q.eigs), p); },
          [&](const FieldSpec::KillingRotation& k) {
            return linear_jet(killing_matrix(k.thetas, m.ambient_dim()), p);
          },
          [&](const FieldSpec::ParallelTorus& t) {
            FieldJet jet = FieldJet::zero(2);
            jet.value = t.v;
            return jet;
          },
          [&](const FieldSpec::Fourier& f) { return fourier_jet(f.modes, m.periods(), p); },
          [&](const FieldSpec::Normalized& n) { return normalize_jet(m, field_jet(m, *n.inner, p), p); },
          [&](const FieldSpec::Scaled& s) { return s.factor * field_jet(m, *s.inner, p); },
      },
      field.kind());
}

Vector evaluate(const Manifold& m, const FieldSpec& field, const Vector& p) {
  m.require_point(p);
  return std::visit(
      Overloaded{
          [&](const FieldSpec::Conformal& c) -> Vector { return c.a - c.a.dot(p) * p; },
          [&](const FieldSpec::QuadraticGradient& q) -> Vector {
            const Vector dx = diag_of(q.eigs).cwiseProduct(p);
            return dx - dx.dot(p) * p;
          },
          [&](const FieldSpec::KillingRotation& k) -> Vector {
            Vector v = Vector::Zero(p.size());
            for (std::size_t i = 0; i < k.thetas.size(); ++i) {
              v[2 * i] = -k.thetas[i] * p[2 * i + 1];
              v[2 * i + 1] = k.thetas[i] * p[2 * i];
            }
            return v;
          },
          [&](const FieldSpec::ParallelTorus& t) -> Vector { return t.v; },
          [&](const FieldSpec::Fourier& f) -> Vector { return fourier_jet(f.modes, m.periods(), p).value; },
          [&](const FieldSpec::Normalized& n) -> Vector {
            const Vector v = evaluate(m, *n.inner, p);
            const double nrm = std::sqrt(m.norm_sq(p, v));
            if (!(nrm >= kNormalizationFloor)) {
              throw DomainError("normalized field evaluated at a zero of its inner field");
            }
            return v / nrm;
          },
          [&](const FieldSpec::Scaled& s) -> Vector { return s.factor * evaluate(m, *s.inner, p); },
      },
      field.kind());
}

double sup_norm_sq(const Manifold& m, const FieldSpec& field) {
  return std::visit(
      Overloaded{
          [&](const FieldSpec::Conformal& c) { return c.a.squaredNorm(); },
          [&](const FieldSpec::QuadraticGradient& q) {
            double lo = q.eigs.front().first, hi = lo;
            for (const auto& e : q.eigs) {
              lo = std::min(lo, e.first);
              hi = std::max(hi, e.first);
            }
            return 0.25 * (hi - lo) * (hi - lo);
          },
          [&](const FieldSpec::KillingRotation& k) {
            double best = 0.0;
            for (double t : k.thetas) best = std::max(best, t * t);
            return best;
          },
          [&](const FieldSpec::ParallelTorus& t) {
            double umax = 0.0;
            if (const Potential* u = m.potential()) {
              for (const auto& term : u->terms()) umax += std::abs(term.coef);
            }
            return std::exp(2.0 * umax) * t.v.squaredNorm();
          },
          [&](const FieldSpec::Fourier& f) {
            double umax = 0.0;
            if (const Potential* u = m.potential()) {
              for (const auto& term : u->terms()) umax += std::abs(term.coef);
            }
            double c0 = 0.0, c1 = 0.0;
            for (const auto& mode : f.modes) (mode.component == 0 ? c0 : c1) += std::abs(mode.coef);
            return std::exp(2.0 * umax) * (c0 * c0 + c1 * c1);
          },
          [&](const FieldSpec::Normalized&) { return 1.0; },
          [&](const FieldSpec::Scaled& s) { return s.factor * s.factor * sup_norm_sq(m, *s.inner); },
      },
      field.kind());
}

}  // namespace kkharm
