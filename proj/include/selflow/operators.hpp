#pragma once

#include "selflow/field.hpp"

namespace selflow {

// Second-order finite differences on the node grid. Every operator takes the
// boundary rule explicitly; Grid::velocity_boundary() and friends give the
// rule that matches a field's role.

template <std::size_t K>
FieldGradient<K> gradient(const Field<K>& f, Boundary rule);

ScalarField divergence(const VectorField& v, Boundary rule);

/// Five-point Laplacian. Under Boundary::fixed the boundary rows are zero.
template <std::size_t K>
Field<K> laplacian(const Field<K>& f, Boundary rule);

/// Divergence restricted to where the projection enforces it: every node when
/// periodic, interior nodes otherwise (boundary entries are zero).
ScalarField projection_divergence(const VectorField& v);

/// Skew-symmetric transport 1/2 [u . grad f + div(u f)].
///
/// On bounded grids u must vanish on the boundary; boundary rows are zero.
/// With that, <advect(u, f), f> = 0 exactly.
template <std::size_t K>
Field<K> advect(const VectorField& u, const Field<K>& f);

/// The field g with <advect(u, f), w> = <u, g> for every u vanishing on the
/// boundary: g_j = 1/2 (d_j f . w - f . d_j w), with w read as zero on the
/// boundary of a bounded grid.
template <std::size_t K>
VectorField advect_adjoint(const Field<K>& f, const Field<K>& w);

/// Quadrature inner product (rectangle rule periodic, trapezoidal otherwise).
template <std::size_t K>
double inner_product(const Field<K>& f, const Field<K>& g);

template <std::size_t K>
double norm_l2(const Field<K>& f);

/// Integral of a scalar field with the same quadrature.
double integrate(const ScalarField& f);

/// Edge-based Dirichlet form sum_edges (forward difference of f)(forward
/// difference of g). Equals -<f, laplacian(g)> for periodic and reflect
/// rules and for fields vanishing on a fixed boundary.
template <std::size_t K>
double dirichlet_form(const Field<K>& f, const Field<K>& g, Boundary rule);

/// Bilinear interpolation at (x, y); wraps on periodic grids and clamps
/// otherwise.
template <std::size_t K>
Vec<K> interpolate(const Field<K>& f, double x, double y);

}  // namespace selflow
