#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kkharm/geometry/calculus.hpp"
#include "kkharm/geometry/manifold.hpp"

namespace kkharm {

/// Nodes and positive weights with sum(weights) = Vol(M).
struct Quadrature {
  std::string description;
  std::vector<Vector> nodes;
  std::vector<double> weights;
  /// Equal-weight random nodes; integrate_with_error then reports a
  /// standard error instead of zero.
  bool monte_carlo = false;

  std::size_t size() const { return nodes.size(); }
  double volume() const;
};

struct QuadratureEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// S^2: Gauss-Legendre in z (resolution nodes) times 2*resolution uniform
/// azimuths. S^3: Hopf coordinates x = (sqrt(1-s) e^{i a}, sqrt(s) e^{i b})
/// with dV = ds da db / 2, Gauss-Legendre in s and 2*resolution uniform
/// angles each. n >= 4: resolution^3 normalized Gaussian samples drawn from
/// `seed`.
Quadrature sphere_quadrature(int n, int resolution, std::uint64_t seed = 1);

/// Trapezoid rule on a resolution x resolution grid, weighted by e^{2u} on a
/// conformal torus. Node (i, j) has index i * resolution + j and coordinates
/// (i hx, j hy).
Quadrature torus_quadrature(const Manifold& m, int resolution);

/// The quadrature of the right kind for m.
Quadrature default_quadrature(const Manifold& m, int resolution, std::uint64_t seed = 1);

/// sum_k w_k f(x_k), evaluated in parallel and reduced in node order.
double integrate(const Quadrature& q, const ScalarFieldFn& f);
QuadratureEstimate integrate_with_error(const Quadrature& q, const ScalarFieldFn& f);

}  // namespace kkharm
