#pragma once

#include <memory>

#include "selflow/field.hpp"

namespace selflow {

struct Projection {
    VectorField u;      ///< divergence-free part
    ScalarField p;      ///< zero-mean potential with u = v - grad p
    int iterations = 0; ///< CG iterations (0 for the spectral path)
    double divergence = 0.0; ///< max |projection_divergence(u)|
};

/// Discrete Leray projector P = I - D^T (D D^T)^+ D, where D is the central
/// divergence used by projection_divergence(). P is the orthogonal projector
/// onto its kernel in the quadrature inner product, so P is idempotent and
/// ||P v|| <= ||v||.
///
/// Periodic grids diagonalise D D^T with a real FFT and solve it exactly;
/// bounded (no-slip) grids run conjugate gradients on the interior nodes and
/// zero the boundary ring of the result.
///
/// Holds FFT plans and scratch buffers: one instance per thread.
class LerayProjector {
public:
    explicit LerayProjector(const Grid& grid, double tolerance = 1e-10, int max_iterations = 0);
    ~LerayProjector();
    LerayProjector(LerayProjector&&) noexcept;
    LerayProjector& operator=(LerayProjector&&) noexcept;
    LerayProjector(const LerayProjector&) = delete;
    LerayProjector& operator=(const LerayProjector&) = delete;

    const Grid& grid() const noexcept;
    double tolerance() const noexcept;

    /// Throws ConvergenceError if CG stalls above the tolerance.
    Projection project(const VectorField& v);
    VectorField apply(const VectorField& v) { return project(v).u; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Projection leray_project(const VectorField& v, double tolerance = 1e-10);

}  // namespace selflow
