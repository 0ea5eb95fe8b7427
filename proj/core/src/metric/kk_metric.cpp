#include "kkharm/metric/kk_metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

constexpr double kGridStep = 1e-3;
constexpr double kDerivativeTolerance = 1e-7;
constexpr double kDerivativeStep = 1e-5;

double param(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw InvalidInput("preset parameter '" + key + "' is required");
  return it->second;
}

void require_same_base(const LiftPair& u, const LiftPair& w) {
  if (u.point.size() != w.point.size() || u.fibre.size() != w.fibre.size() ||
      !(u.point - w.point).isZero(1e-14) || !(u.fibre - w.fibre).isZero(1e-14)) {
    throw InvalidInput("lifts are based at different points of TM");
  }
}

// Worst relative derivative mismatch of one profile on the grid, skipping
// points whose stencil straddles a breakpoint.
double derivative_mismatch(const ScalarProfile& f, double t_max) {
  const auto breaks = f.breakpoints();
  double worst = 0.0;
  const int count = static_cast<int>(std::floor(t_max / 0.01));
  for (int i = 0; i <= count; ++i) {
    const double t = std::max(i * 0.01, kDerivativeStep);
    bool straddles = false;
    for (double b : breaks) straddles |= std::abs(t - b) <= 2.0 * kDerivativeStep;
    if (straddles) continue;
    try {
      const double fd =
          (f.value(t + kDerivativeStep) - f.value(t - kDerivativeStep)) / (2.0 * kDerivativeStep);
      const double d = f.derivative(t);
      const double scale = std::max({std::abs(d), std::abs(f.value(t)), 1.0});
      worst = std::max(worst, std::abs(fd - d) / scale);
    } catch (const DomainError&) {
      // Reported by the positivity scan.
    }
  }
  return worst;
}

}  // namespace

ProfileValues evaluate_profiles(const KKMetricSpec& spec, double t) {
  ProfileValues v;
  v.t = t;
  v.A = spec.A.value(t);
  v.dA = spec.A.derivative(t);
  v.B = spec.B.value(t);
  v.dB = spec.B.derivative(t);
  v.C = spec.C.value(t);
  v.dC = spec.C.derivative(t);
  return v;
}

ProfileValues checked_profiles(const KKMetricSpec& spec, double t) {
  const ProfileValues v = evaluate_profiles(spec, t);
  if (!(v.A > 0.0) || !(v.B > 0.0) || !(v.radial() > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "metric '" << spec.name << "' is degenerate at t=" << t << " (A=" << v.A << ", B=" << v.B
       << ", B+tC=" << v.radial() << ")";
    throw MetricDegeneracy(os.str());
  }
  return v;
}

KKMetricSpec preset(const std::string& name, const std::map<std::string, double>& params,
                    double t_max) {
  KKMetricSpec spec;
  spec.t_max = t_max;
  if (name == "sasaki") {
    spec.name = "sasaki";
  } else if (name == "g_mr" || name == "cheeger-gromoll") {
    const double m = name == "g_mr" ? param(params, "m") : 1.0;
    const double r = name == "g_mr" ? param(params, "r") : 1.0;
    if (r < 0.0) throw InvalidInput("g_mr requires r >= 0");
    std::ostringstream os;
    os << "g_mr(" << m << "," << r << ")";
    spec.name = name == "g_mr" ? os.str() : "cheeger-gromoll";
    spec.B = ScalarProfile::power(1.0, 1.0, 1.0, -m);
    spec.C = r == 0.0 ? ScalarProfile::constant(0.0) : ScalarProfile::power(r, 1.0, 1.0, -m);
  } else {
    throw InvalidInput("unknown metric preset '" + name + "'");
  }
  const ValidationReport report = validate(spec);
  if (!report.ok) throw InvalidInput("preset '" + name + "' failed validation: " + report.message);
  return spec;
}

ValidationReport validate(const KKMetricSpec& spec) {
  ValidationReport r;
  r.t_max = spec.t_max;
  if (!(spec.t_max >= 0.0)) {
    r.ok = false;
    r.message = "t_max must be nonnegative";
    return r;
  }
  const int cells = static_cast<int>(std::ceil(spec.t_max / kGridStep - 1e-9));
  r.min_A = r.min_B = r.min_radial = r.cell_bound = INFINITY;
  ProfileValues prev;
  for (int i = 0; i <= cells; ++i) {
    const double t = std::min(i * kGridStep, spec.t_max);
    ProfileValues v;
    try {
      v = evaluate_profiles(spec, t);
    } catch (const DomainError& e) {
      r.ok = false;
      r.failure_t = t;
      r.message = std::string("profile undefined: ") + e.what();
      return r;
    }
    r.min_A = std::min(r.min_A, v.A);
    r.min_B = std::min(r.min_B, v.B);
    r.min_radial = std::min(r.min_radial, v.radial());
    if (!(v.A > 0.0 && v.B > 0.0 && v.radial() > 0.0) && !r.failure_t) r.failure_t = t;
    if (i > 0) {
      const double h = t - prev.t;
      const double radial_slope_prev = prev.dB + prev.C + prev.t * prev.dC;
      const double radial_slope = v.dB + v.C + v.t * v.dC;
      const double bounds[] = {
          std::min(prev.A, v.A) - 0.5 * h * std::max(std::abs(prev.dA), std::abs(v.dA)),
          std::min(prev.B, v.B) - 0.5 * h * std::max(std::abs(prev.dB), std::abs(v.dB)),
          std::min(prev.radial(), v.radial()) -
              0.5 * h * std::max(std::abs(radial_slope_prev), std::abs(radial_slope)),
      };
      for (double b : bounds) {
        r.cell_bound = std::min(r.cell_bound, b);
        if (!(b > 0.0) && !r.failure_t) r.failure_t = prev.t;
      }
    }
    prev = v;
  }
  r.derivative_mismatch = std::max({derivative_mismatch(spec.A, spec.t_max),
                                    derivative_mismatch(spec.B, spec.t_max),
                                    derivative_mismatch(spec.C, spec.t_max)});
  std::ostringstream os;
  os.precision(17);
  if (r.failure_t) {
    r.ok = false;
    os << "positivity fails at t=" << *r.failure_t << " (min A=" << r.min_A << ", min B=" << r.min_B
       << ", min B+tC=" << r.min_radial << ")";
  } else if (r.derivative_mismatch > kDerivativeTolerance) {
    r.ok = false;
    os << "profile derivative disagrees with finite differences (relative " << r.derivative_mismatch
       << ")";
  } else {
    os << "ok";
  }
  r.message = os.str();
  return r;
}

LiftPair horizontal_lift(const Vector& p, const Vector& e, const Vector& x) {
  return {p, e, x, Vector::Zero(x.size())};
}

LiftPair vertical_lift(const Vector& p, const Vector& e, const Vector& x) {
  return {p, e, Vector::Zero(x.size()), x};
}

double metric_on_lifts(const KKMetricSpec& spec, const Manifold& m, const LiftPair& u,
                       const LiftPair& w) {
  require_same_base(u, w);
  const Vector& p = u.point;
  const Vector& e = u.fibre;
  const ProfileValues v = evaluate_profiles(spec, m.norm_sq(p, e));
  return v.A * m.inner(p, u.horizontal, w.horizontal) + v.B * m.inner(p, u.vertical, w.vertical) +
         v.C * m.inner(p, u.vertical, e) * m.inner(p, e, w.vertical);
}

LiftCase parse_lift_case(const std::string& tag) {
  if (tag == "hh") return LiftCase::kHH;
  if (tag == "hv") return LiftCase::kHV;
  if (tag == "vh") return LiftCase::kVH;
  if (tag == "vv") return LiftCase::kVV;
  throw InvalidInput("invalid lift case '" + tag + "' (expected hh, hv, vh or vv)");
}

LiftPair connection_eval(const KKMetricSpec& spec, const Manifold& m, const Vector& p,
                         const Vector& e, LiftCase lift_case, const Vector& x, const Vector& y,
                         const Vector& nabla_x_y) {
  const double t = m.norm_sq(p, e);
  const ProfileValues v = checked_profiles(spec, t);
  const Vector zero = Vector::Zero(p.size());
  LiftPair out{p, e, zero, zero};
  switch (lift_case) {
    case LiftCase::kHH:
      out.horizontal = nabla_x_y;
      out.vertical = -(v.dA / v.radial()) * m.inner(p, x, y) * e - 0.5 * m.riemann(p, x, y, e);
      break;
    case LiftCase::kHV:
      out.horizontal = (-v.B / (2.0 * v.A)) * m.riemann(p, y, e, x) +
                       (v.dA / v.A) * m.inner(p, y, e) * x;
      out.vertical = nabla_x_y;
      break;
    case LiftCase::kVH:
      out.horizontal = (v.B / (2.0 * v.A)) * m.riemann(p, e, x, y) +
                       (v.dA / v.A) * m.inner(p, x, e) * y;
      break;
    case LiftCase::kVV: {
      const double xe = m.inner(p, x, e), ye = m.inner(p, y, e);
      out.vertical = (v.dB / v.B) * (xe * y + ye * x) +
                     ((v.dC - 2.0 * v.dB * v.C / v.B) / v.radial()) * xe * ye * e +
                     ((v.C - v.dB) / v.radial()) * m.inner(p, x, y) * e;
      break;
    }
  }
  return out;
}

}  // namespace kkharm
