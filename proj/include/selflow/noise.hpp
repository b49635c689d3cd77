#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selflow/field.hpp"
#include "selflow/projection.hpp"

namespace selflow {

/// Brownian increments for one time step: the N retained modes of the
/// cylindrical process W1 and the scalar W2.
struct Increments {
    std::vector<double> db;
    double dw2 = 0.0;
};

/// Seeded source of Wiener increments for one path.
///
/// Every unit normal is keyed by (seed, fine step, stream), so identical
/// (seed, N) give identical sequences on any grid and for any epsilon. Each
/// call to sample() consumes `substeps` fine steps and sums them, which lets
/// runs at dt, dt/2, dt/4 share one Brownian path.
class WienerDriver {
public:
    static constexpr std::uint32_t w2_stream = 0xFFFFFFFFu;

    WienerDriver(std::uint64_t seed, int n_modes, int substeps = 1);

    /// Throws ArgumentError for dt < 0.
    Increments sample(double dt);

    std::uint64_t seed() const noexcept { return seed_; }
    int modes() const noexcept { return n_modes_; }
    int substeps() const noexcept { return substeps_; }
    std::uint64_t position() const noexcept { return fine_step_; }
    void seek(std::uint64_t fine_step) noexcept { fine_step_ = fine_step; }

private:
    std::uint64_t seed_;
    int n_modes_;
    int substeps_;
    std::uint64_t fine_step_ = 0;
};

struct NoiseSpec {
    int modes = 8;
    double sigma0 = 1.0;
    double q = 1.5;
};

/// Diagonal Hilbert-Schmidt noise coefficient
///   S(u)(e_i) = sigma0 i^-q P(psi_i u + g_i),  i = 1..N.
///
/// Default shapes are psi_i = cos(i pi x / lx) cos(i pi y / ly) on bounded
/// grids and cos(2 i pi x / lx) cos(2 i pi y / ly) on periodic ones; the
/// additive parts g_i default to zero.
class NoiseOperator {
public:
    NoiseOperator(const Grid& grid, NoiseSpec spec);
    NoiseOperator(const Grid& grid, NoiseSpec spec, std::vector<ScalarField> shapes,
                  std::vector<VectorField> additive = {});

    const Grid& grid() const noexcept { return grid_; }
    int modes() const noexcept { return spec_.modes; }
    const NoiseSpec& spec() const noexcept { return spec_; }
    /// sigma0 * (i + 1)^-q for zero-based i.
    double coefficient(int i) const;
    const ScalarField& shape(int i) const { return shapes_.at(i); }

    /// S(u)(e_i), projected.
    VectorField mode(LerayProjector& proj, const VectorField& u, int i) const;
    /// sum_i S(u)(e_i) db_i before projection.
    VectorField unprojected(const VectorField& u, std::span<const double> db) const;
    /// sum_i S(u)(e_i) db_i. Throws ArgumentError when db.size() != N.
    VectorField apply(LerayProjector& proj, const VectorField& u, std::span<const double> db) const;
    /// sum_i ||S(u)(e_i)||^2.
    double hs_norm_sq(LerayProjector& proj, const VectorField& u) const;
    /// C with hs_norm_sq(u) <= C (1 + ||u||^2), from the mode data alone.
    double linear_growth_constant() const;

private:
    Grid grid_;
    NoiseSpec spec_;
    std::vector<ScalarField> shapes_;
    std::vector<VectorField> additive_;
    std::vector<double> shape_sup_;
    std::vector<double> additive_norm_;
};

/// External field h; `descriptor` records its origin ("const:0,0,1", ...).
struct MagneticField {
    DirectorField h;
    std::string descriptor;

    static MagneticField constant(const Grid& grid, const Vec3& value);
    double sup() const { return h.max_abs(); }
    /// Largest forward difference quotient, a discrete stand-in for |grad h|.
    double sup_gradient() const;
};

/// (d x h) dw2 pointwise.
DirectorField apply_noise_d(const DirectorField& d, const DirectorField& h, double dw2);

/// sqrt(sum_i c_i^2 / i^2), one-based i.
double k2_norm(std::span<const double> coeffs);

}  // namespace selflow
