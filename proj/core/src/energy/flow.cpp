#include "kkharm/energy/flow.hpp"

#include <cmath>
#include <numbers>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

using V2 = Eigen::Vector2d;

V2 rotate(double c, double s, const V2& v) { return {c * v.x() - s * v.y(), s * v.x() + c * v.y()}; }
V2 rotate_back(double c, double s, const V2& v) { return {c * v.x() + s * v.y(), -s * v.x() + c * v.y()}; }

// Lattice data of one torus grid: link rotations and weights, conformal
// factors at the nodes.
struct Lattice {
  int n = 0;
  double wx = 0.0, wy = 0.0, cell = 0.0;
  std::vector<double> cx, sx, cy, sy, eu;

  Lattice(const Manifold& m, int resolution) : n(resolution) {
    const V2 l = m.periods();
    const double hx = l[0] / n, hy = l[1] / n;
    wx = hy / hx;
    wy = hx / hy;
    cell = hx * hy;
    const std::size_t size = static_cast<std::size_t>(n) * n;
    cx.assign(size, 1.0);
    sx.assign(size, 0.0);
    cy.assign(size, 1.0);
    sy.assign(size, 0.0);
    eu.assign(size, 1.0);
    const Potential* u = m.potential();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * n + j;
        if (!u) continue;
        const V2 p(i * hx, j * hy);
        eu[k] = std::exp(u->value(p));
        // Simpson rule for the connection form along each link.
        const double ax = -(hx / 6.0) * (u->gradient(p).y() + 4.0 * u->gradient(p + V2(0.5 * hx, 0)).y() +
                                         u->gradient(p + V2(hx, 0)).y());
        const double ay = (hy / 6.0) * (u->gradient(p).x() + 4.0 * u->gradient(p + V2(0, 0.5 * hy)).x() +
                                        u->gradient(p + V2(0, hy)).x());
        cx[k] = std::cos(ax);
        sx[k] = std::sin(ax);
        cy[k] = std::cos(ay);
        sy[k] = std::sin(ay);
      }
    }
  }

  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>((i % n + n) % n) * n + static_cast<std::size_t>((j % n + n) % n);
  }

  double energy(const std::vector<V2>& a) const {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t k = at(i, j);
        sum += wx * (1.0 - a[k].dot(rotate(cx[k], sx[k], a[at(i + 1, j)])));
        sum += wy * (1.0 - a[k].dot(rotate(cy[k], sy[k], a[at(i, j + 1)])));
      }
    }
    return sum;
  }

  // Tangential gradient of energy() at every node.
  std::vector<V2> gradient(const std::vector<V2>& a) const {
    std::vector<V2> g(a.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t k = at(i, j), kx = at(i - 1, j), ky = at(i, j - 1);
        V2 v = wx * rotate(cx[k], sx[k], a[at(i + 1, j)]) + wy * rotate(cy[k], sy[k], a[at(i, j + 1)]) +
               wx * rotate_back(cx[kx], sx[kx], a[kx]) + wy * rotate_back(cy[ky], sy[ky], a[ky]);
        v = -v;
        g[k] = v - v.dot(a[k]) * a[k];
      }
    }
    return g;
  }

  double residual(const std::vector<V2>& g) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, g[k].norm() / (cell * eu[k] * eu[k]));
    return worst;
  }
};

std::vector<V2> frame_components(const Manifold& m, const DiscreteField& f) {
  std::vector<V2> a(f.values.size());
  for (int i = 0; i < f.resolution; ++i) {
    for (int j = 0; j < f.resolution; ++j) {
      const std::size_t k = f.index(i, j);
      a[k] = std::exp(m.log_conformal_factor(f.point(i, j))) * f.values[k];
    }
  }
  return a;
}

void require_unit_grid(const Manifold& m, const DiscreteField& f) {
  if (!m.is_torus()) throw InvalidInput("the unit flow runs on tori");
  if (f.resolution < 4 || static_cast<int>(f.values.size()) != f.resolution * f.resolution) {
    throw InvalidInput("malformed grid field");
  }
  if (!f.periods.isApprox(m.periods(), 1e-12)) throw InvalidInput("grid periods differ from the torus");
  const double defect = f.unit_defect(m);
  if (defect > 1e-9) throw InvalidInput("field is not unit (defect " + std::to_string(defect) + ")");
}

double constant_part(const Manifold& m, const KKMetricSpec& spec) {
  return 0.5 * m.dimension() * checked_profiles(spec, 1.0).A * m.volume();
}

}  // namespace

double lattice_energy(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f) {
  require_unit_grid(m, f);
  const Lattice lat(m, f.resolution);
  return constant_part(m, spec) + checked_profiles(spec, 1.0).B * lat.energy(frame_components(m, f));
}

double lattice_residual(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f) {
  require_unit_grid(m, f);
  const Lattice lat(m, f.resolution);
  // The B(1) factors of the gradient and of the normalization cancel.
  (void)checked_profiles(spec, 1.0);
  return lat.residual(lat.gradient(frame_components(m, f)));
}

FlowResult unit_flow_torus(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& init,
                           const FlowSchedule& schedule) {
  require_unit_grid(m, init);
  if (!(schedule.initial_step > 0.0) || schedule.max_iterations < 0 || schedule.history_stride < 1) {
    throw InvalidInput("flow schedule needs a positive step, non-negative iteration cap and stride >= 1");
  }
  const Lattice lat(m, init.resolution);
  const double b1 = checked_profiles(spec, 1.0).B;
  const double base = constant_part(m, spec);
  // Steps are scaled so that initial_step < 1/4 is stable on any aspect ratio.
  const double scale = 1.0 / std::max(lat.wx, lat.wy);

  std::vector<V2> a = frame_components(m, init);
  for (auto& v : a) v.normalize();
  double e = lat.energy(a);
  std::vector<V2> g = lat.gradient(a);
  double r = lat.residual(g);

  FlowResult out;
  out.history.push_back({0, base + b1 * e, r});
  int it = 0;
  std::vector<V2> trial(a.size());
  while (r >= schedule.target_residual && it < schedule.max_iterations) {
    double step = schedule.initial_step;
    double e_trial = 0.0;
    bool accepted = false;
    while (step >= schedule.min_step) {
      for (std::size_t k = 0; k < a.size(); ++k) trial[k] = (a[k] - step * scale * g[k]).normalized();
      e_trial = lat.energy(trial);
      if (e_trial <= e) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.message = "line search stalled at iteration " + std::to_string(it);
      break;
    }
    if (e_trial > e) out.monotone = false;
    a.swap(trial);
    e = e_trial;
    g = lat.gradient(a);
    r = lat.residual(g);
    ++it;
    if (it % schedule.history_stride == 0) out.history.push_back({it, base + b1 * e, r});
  }
  if (out.history.back().iteration != it) out.history.push_back({it, base + b1 * e, r});

  out.iterations = it;
  out.energy = base + b1 * e;
  out.residual = r;
  out.converged = r < schedule.target_residual;
  if (out.message.empty()) {
    out.message = out.converged ? "converged" : "iteration cap reached";
  }
  out.field = init;
  out.field.unit_constrained = true;
  for (int i = 0; i < init.resolution; ++i) {
    for (int j = 0; j < init.resolution; ++j) {
      const std::size_t k = init.index(i, j);
      out.field.values[k] = a[k] / lat.eu[k];
    }
  }
  return out;
}

DiscreteField random_unit_field(const Manifold& m, int resolution, Rng& rng) {
  if (!m.is_torus()) throw InvalidInput("random_unit_field needs a torus");
  struct Mode {
    int kx, ky;
    double amp, phase;
  };
  std::vector<Mode> modes;
  const double offset = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (int kx = -2; kx <= 2; ++kx) {
    for (int ky = 0; ky <= 2; ++ky) {
      if (ky == 0 && kx <= 0) continue;
      const double amp = 1.5 * rng.normal() / (1.0 + kx * kx + ky * ky);
      modes.push_back({kx, ky, amp, rng.uniform(0.0, 2.0 * std::numbers::pi)});
    }
  }
  DiscreteField f;
  f.resolution = resolution;
  f.periods = m.periods();
  f.values.resize(static_cast<std::size_t>(resolution) * resolution);
  f.unit_constrained = true;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const Vector p = f.point(i, j);
      const double x = 2.0 * std::numbers::pi * p[0] / f.periods[0];
      const double y = 2.0 * std::numbers::pi * p[1] / f.periods[1];
      double theta = offset;
      for (const Mode& md : modes) theta += md.amp * std::cos(md.kx * x + md.ky * y + md.phase);
      f.values[f.index(i, j)] = std::exp(-m.log_conformal_factor(p)) * V2(std::cos(theta), std::sin(theta));
    }
  }
  return f;
}

DiscreteField constant_angle_field(const Manifold& m, int resolution, double angle) {
  if (!m.is_torus()) throw InvalidInput("constant_angle_field needs a torus");
  DiscreteField f;
  f.resolution = resolution;
  f.periods = m.periods();
  f.values.resize(static_cast<std::size_t>(resolution) * resolution);
  f.unit_constrained = true;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      f.values[f.index(i, j)] =
          std::exp(-m.log_conformal_factor(f.point(i, j))) * V2(std::cos(angle), std::sin(angle));
    }
  }
  return f;
}

}  // namespace kkharm
