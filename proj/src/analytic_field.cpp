#include "plume/analytic_field.hpp"

#include <algorithm>
#include <stdexcept>

namespace plume {

namespace {

// Shared evaluation of -0.5 * ln(max(R^2, floor)) so that the concentration
// model and c_constant agree bit-for-bit away from their clamps.
double half_neg_log_r2(double px, double py, const SourceParams& src, const DomainGeom& dom) {
  const double r2 = moebius_R2(px, py, src, dom);
  return -0.5 * std::log(std::max(r2, kR2Floor));
}

}  // namespace

double moebius_R2(double px, double py, const SourceParams& src, const DomainGeom& dom) {
  if (dom.radius <= 0.0) throw std::invalid_argument("domain radius must be positive");
  if (src.x * src.x + src.y * src.y >= dom.radius * dom.radius)
    throw std::invalid_argument("source must lie strictly inside the domain");
  const double dx = px - src.x;
  const double dy = py - src.y;
  const double cross = px * src.y - py * src.x;
  const double dot = dom.radius * dom.radius - px * src.x - py * src.y;
  const double den = cross * cross + dot * dot;
  if (den <= 0.0) throw std::invalid_argument("source must lie strictly inside the domain");
  return dom.radius * dom.radius * (dx * dx + dy * dy) / den;
}

double mean_concentration_model(double px, double py, const SourceParams& src,
                                const DomainGeom& dom) {
  if (src.rate <= 0.0) throw std::invalid_argument("release rate must be positive");
  return src.rate * std::max(0.0, half_neg_log_r2(px, py, src, dom));
}

double c_constant(double px, double py, const SourceParams& src, const DomainGeom& dom) {
  return std::clamp(half_neg_log_r2(px, py, src, dom), kCFloor, c_ceiling());
}

double tortuosity(double p) {
  if (p < 0.0 || p >= 0.5) throw std::invalid_argument("missing-link fraction must be in [0, 0.5)");
  return std::pow(1.0 - 2.0 * p, 1.30);
}

}  // namespace plume
