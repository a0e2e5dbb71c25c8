#pragma once

#include <cmath>

namespace plume {

// Circular search domain centred on the origin.
struct DomainGeom {
  double radius = 0.0;
};

// Source hypothesis: position plus effective (dispersion-corrected) release rate.
struct SourceParams {
  double x = 0.0;
  double y = 0.0;
  double rate = 0.0;
};

// Floor applied to the squared Mobius radius before the logarithm; keeps the
// field finite at the source itself.
inline constexpr double kR2Floor = 1e-6;
// Clamp range for the per-position constant c = lambda / rate.
inline constexpr double kCFloor = 1e-6;
inline double c_ceiling() { return -0.5 * std::log(kR2Floor); }

// Squared radius of the Mobius image that maps the source to the disk centre.
// In (0, 1] for points strictly inside the disk, exactly 1 on the circle.
double moebius_R2(double px, double py, const SourceParams& src, const DomainGeom& dom);

// Mean expected count at (px, py): -(rate/2) * ln(R^2), floored at zero.
double mean_concentration_model(double px, double py, const SourceParams& src,
                                const DomainGeom& dom);

// c = lambda / rate, clamped to [kCFloor, c_ceiling()]; rate-independent.
double c_constant(double px, double py, const SourceParams& src, const DomainGeom& dom);

// Path-stretch correction for a lattice with fraction p of links removed.
// The effective rate seen by the model is rate0 / tortuosity(p).
double tortuosity(double p);

}  // namespace plume
