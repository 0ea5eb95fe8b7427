#pragma once

#include <string>
#include <vector>

#include "kkharm/energy/energy.hpp"
#include "kkharm/util/random.hpp"

namespace kkharm {

struct FlowSchedule {
  int max_iterations = 50000;
  double initial_step = 0.1;
  double min_step = 1e-10;
  double target_residual = 1e-4;
  /// Keep every n-th history row (first and last always kept).
  int history_stride = 1;
};

struct FlowRecord {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
};

struct FlowResult {
  DiscreteField field;
  std::vector<FlowRecord> history;
  int iterations = 0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
  /// Energy never increased across accepted steps.
  bool monotone = true;
  std::string message;
};

/// Energy of a unit field on the torus grid: m A(1) Vol / 2 plus B(1) times
/// the gauge covariant lattice energy
///   sum_links w_link (1 - <alpha_i, R(a_ij) alpha_j>)
/// of the frame components alpha, where a_ij integrates the connection form
/// -u_y dx + u_x dy of the conformal metric along the link.
double lattice_energy(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f);

/// max over nodes of |tangential gradient| / (B(1) hx hy e^{2u}), a
/// discretization of |nabla* nabla sigma - |nabla sigma|^2 sigma|.
double lattice_residual(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& f);

/// Projected gradient descent of lattice_energy over unit fields with
/// backtracking from schedule.initial_step. Stops when the residual drops
/// below the target; failure to converge is reported, not thrown.
FlowResult unit_flow_torus(const Manifold& m, const KKMetricSpec& spec, const DiscreteField& init,
                           const FlowSchedule& schedule = {});

/// Unit field whose frame angle is a random smooth periodic function (low
/// Fourier modes, no winding).
DiscreteField random_unit_field(const Manifold& m, int resolution, Rng& rng);

/// Unit field with constant frame angle.
DiscreteField constant_angle_field(const Manifold& m, int resolution, double angle);

}  // namespace kkharm
