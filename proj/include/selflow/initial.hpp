#pragma once

#include "selflow/field.hpp"

namespace selflow {

/// Projected Taylor-Green vortex with k cells per unit length in each
/// direction: stream function amp / |k| sin(kx x) sin(ky y).
VectorField taylor_green(const Grid& grid, int k, double amp);

/// Smooth unit-length texture with zero normal derivative on the box:
/// d = (cos t cos s, sin t cos s, sin s), t = amp cos(2 pi x) cos(2 pi y),
/// s = amp / 2 cos(4 pi x), in coordinates scaled to the unit square.
DirectorField texture_director(const Grid& grid, double amp);

/// Periodic unit-length texture with generic phases, so no stress pairing vanishes by symmetry:
/// t = amp (cos 2pi(x + y) + 0.4 sin(2pi y + 1) + 0.3 sin(2pi x + 2)),
/// s = amp (0.5 sin 2pi(x - y) + 0.25 cos(2pi(x + 2y) + 0.5)).
DirectorField skew_texture_director(const Grid& grid, double amp);

/// Spatially varying field h = (amp sin(2 pi y), amp cos(2 pi x), 1) in
/// coordinates scaled to the unit square; periodic on the box.
DirectorField wave_field(const Grid& grid, double amp);

/// Planar degree-one vortex ((x - xc), (y - yc), 0) / sqrt(rho^2 + core^2).
DirectorField vortex_director(const Grid& grid, double xc, double yc, double core);

}  // namespace selflow
