#include "kkharm/fields/sampling.hpp"

#include <cmath>

#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

// Smallest g-norm among the inner fields of Normalized wrappers at p.
double normalization_margin(const Manifold& m, const FieldSpec& field, const Vector& p) {
  if (const auto* n = field.get_if<FieldSpec::Normalized>()) {
    const Vector v = evaluate(m, *n->inner, p);
    return std::min(std::sqrt(m.inner(p, v, v)), normalization_margin(m, *n->inner, p));
  }
  if (const auto* s = field.get_if<FieldSpec::Scaled>()) return normalization_margin(m, *s->inner, p);
  return INFINITY;
}

}  // namespace

std::vector<Vector> sample_points(const Manifold& m, const FieldSpec* field, int count, Rng& rng,
                                  double min_norm) {
  if (count < 0) throw InvalidInput("sample count must be non-negative");
  if (field) require_compatible(m, *field);
  std::vector<Vector> out;
  out.reserve(count);
  int rejected = 0;
  while (static_cast<int>(out.size()) < count) {
    Vector p;
    if (m.is_sphere()) {
      p = rng.unit_vector(m.ambient_dim());
    } else {
      const Eigen::Vector2d l = m.periods();
      p = Vector(2);
      p << rng.uniform(0.0, l[0]), rng.uniform(0.0, l[1]);
    }
    if (field && normalization_margin(m, *field, p) < min_norm) {
      if (++rejected > 1000 + 100 * count) {
        throw DomainError("field " + field->id() + " vanishes almost everywhere on " + m.describe());
      }
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace kkharm
