#include "kkharm/energy/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kkharm/util/errors.hpp"
#include "kkharm/util/parallel.hpp"
#include "kkharm/util/random.hpp"

namespace kkharm {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double Quadrature::volume() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidInput("Gauss-Legendre order must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
}

Quadrature sphere_quadrature(int n, int resolution, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("sphere dimension must be >= 2");
  if (resolution < 2) throw InvalidInput("quadrature resolution must be >= 2");
  Quadrature q;
  std::ostringstream os;
  std::vector<double> gx, gw;
  if (n == 2) {
    gauss_legendre(resolution, gx, gw);
    const int na = 2 * resolution;
    const double da = 2.0 * kPi / na;
    for (int i = 0; i < resolution; ++i) {
      const double z = gx[i], r = std::sqrt(1.0 - z * z);
      for (int j = 0; j < na; ++j) {
        const double a = (j + 0.5) * da;
        Vector x(3);
        x << r * std::cos(a), r * std::sin(a), z;
        q.nodes.push_back(x);
        q.weights.push_back(gw[i] * da);
      }
    }
    os << "S^2 gauss-legendre(z," << resolution << ") x uniform(phi," << na << ")";
  } else if (n == 3) {
    gauss_legendre(resolution, gx, gw);
    const int na = 2 * resolution;
    const double da = 2.0 * kPi / na;
    for (int i = 0; i < resolution; ++i) {
      const double s = 0.5 * (gx[i] + 1.0);
      const double c1 = std::sqrt(1.0 - s), c2 = std::sqrt(s);
      // ds = dx/2 on [0,1], times the 1/2 of the volume element.
      const double ws = 0.25 * gw[i];
      for (int a = 0; a < na; ++a) {
        const double al = (a + 0.5) * da;
        for (int b = 0; b < na; ++b) {
          const double be = (b + 0.5) * da;
          Vector x(4);
          x << c1 * std::cos(al), c1 * std::sin(al), c2 * std::cos(be), c2 * std::sin(be);
          q.nodes.push_back(x);
          q.weights.push_back(ws * da * da);
        }
      }
    }
    os << "S^3 hopf gauss-legendre(s," << resolution << ") x uniform(" << na << "x" << na << ")";
  } else {
    const Manifold m = Manifold::sphere(n);
    const int count = resolution * resolution * resolution;
    Rng rng(seed);
    for (int k = 0; k < count; ++k) q.nodes.push_back(rng.unit_vector(n + 1));
    q.weights.assign(count, m.volume() / count);
    q.monte_carlo = true;
    os << "S^" << n << " monte-carlo(" << count << ",seed=" << seed << ")";
  }
  q.description = os.str();
  return q;
}

Quadrature torus_quadrature(const Manifold& m, int resolution) {
  if (!m.is_torus()) throw InvalidInput("torus_quadrature needs a torus");
  if (resolution < 2) throw InvalidInput("quadrature resolution must be >= 2");
  const Eigen::Vector2d l = m.periods();
  const double hx = l[0] / resolution, hy = l[1] / resolution;
  Quadrature q;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      Vector x(2);
      x << i * hx, j * hy;
      q.weights.push_back(hx * hy * std::exp(2.0 * m.log_conformal_factor(x)));
      q.nodes.push_back(std::move(x));
    }
  }
  std::ostringstream os;
  os << "T^2 trapezoid(" << resolution << "x" << resolution << ")";
  q.description = os.str();
  return q;
}

Quadrature default_quadrature(const Manifold& m, int resolution, std::uint64_t seed) {
  if (m.is_torus()) return torus_quadrature(m, resolution);
  return sphere_quadrature(m.dimension(), resolution, seed);
}

double integrate(const Quadrature& q, const ScalarFieldFn& f) {
  return parallel_sum(q.size(), [&](std::size_t k) { return q.weights[k] * f(q.nodes[k]); });
}

QuadratureEstimate integrate_with_error(const Quadrature& q, const ScalarFieldFn& f) {
  std::vector<double> values(q.size());
  parallel_for(q.size(), [&](std::size_t k) { values[k] = f(q.nodes[k]); });
  QuadratureEstimate e;
  for (std::size_t k = 0; k < values.size(); ++k) e.value += q.weights[k] * values[k];
  if (q.monte_carlo && values.size() > 1) {
    const double vol = q.volume();
    const double mean = e.value / vol;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    e.standard_error = vol * std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

}  // namespace kkharm
