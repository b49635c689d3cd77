#pragma once

#include <cstddef>
#include <optional>

#include "selflow/field.hpp"
#include "selflow/noise.hpp"
#include "selflow/projection.hpp"

namespace selflow {

/// Physical and numerical parameters of the relaxed system.
struct Params {
    double eps = 0.1;
    double mu = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
    double xi1 = 1.0;
    double xi2 = 1.0;
    double dt = 1e-4;
    double T = 0.1;
    /// Accept dt above stability_dt().
    bool allow_unstable_dt = false;
    /// Divergence tolerance of the pressure projection.
    double proj_tol = 1e-10;

    /// Throws ArgumentError naming the offending field.
    void validate() const;
};

/// One path of the coupled system.
struct SimState {
    double t = 0.0;
    std::size_t step = 0;
    VectorField u;
    DirectorField d;
    ScalarField p;
    /// sum <u_n, S(u_n) dB_n>  (unscaled by xi1)
    double ledger1 = 0.0;
    /// sum <d_n x h, lap d_n - f_eps(d_n)> dW2_n  (unscaled by lambda, xi2)
    double ledger2 = 0.0;

    SimState(VectorField u0, DirectorField d0);
};

/// Ginzburg-Landau force (|d|^2 - 1) d / eps^2.
DirectorField gl_force(const DirectorField& d, double eps);
/// (1 - |d|^2)^2 / (4 eps^2).
ScalarField penalty_density(const DirectorField& d, double eps);
/// Ito drift of the Stratonovich director noise: xi2^2 / 2 (d x h) x h.
DirectorField strat_correction(const DirectorField& d, const DirectorField& h, double xi2 = 1.0);

/// Components (xx, xy, yy) of grad d (.) grad d.
Field<3> ericksen_tensor(const DirectorField& d);
/// div(grad d (.) grad d); enters the momentum equation with a -lambda.
VectorField ericksen_stress_div(const DirectorField& d);

/// min(h^2/(8 mu), h^2/(8 gamma), eps^2/(4 gamma), h/(2 |u|_inf)).
double stability_dt(double eps, const Grid& grid, double mu, double gamma, double u_max = 0.0);

/// Per-step quantities evaluated at the time-n state.
struct StepInfo {
    double dissipation_u = 0.0;   ///< discrete int |grad u|^2
    double dissipation_d = 0.0;   ///< int |lap d - f_eps(d)|^2
    double ledger1_increment = 0.0;
    double ledger2_increment = 0.0;
    double transport_u = 0.0;     ///< <advect(u, u), u>
    double divergence = 0.0;      ///< max |div u| after the step
};

/// Explicit Euler-Maruyama stepper for the Ito form of the relaxed system.
///
/// Director:  d+ = d + dt [-adv(u, d) + gamma w + xi2^2/2 (d x h) x h]
///                   + xi2 (d x h) dW2,        w = lap d - f_eps(d)
/// Velocity:  u+ = P(u + dt [-adv(u, u) + mu lap u - lambda A(d, w)]
///                   + xi1 S(u) dB)
/// where A(d, w) = advect_adjoint(d, w) is the Ericksen force written
/// modulo a gradient so that the transport and stress work cancel exactly
/// on the grid. Both updates read the time-n fields.
class Stepper {
public:
    Stepper(const Grid& grid, Params params, NoiseOperator noise, MagneticField h);

    const Grid& grid() const noexcept { return grid_; }
    const Params& params() const noexcept { return params_; }
    const NoiseOperator& noise() const noexcept { return noise_; }
    const MagneticField& field_h() const noexcept { return h_; }
    LerayProjector& projector() noexcept { return proj_; }

    /// Throws StabilityError unless params().allow_unstable_dt.
    void check_stability(const VectorField& u) const;

    DirectorField step_director(const SimState& s, double dw2) const;
    Projection step_velocity(const SimState& s, std::span<const double> db);

    /// Advances s by dt using the given increments. Throws BlowUpError on
    /// non-finite output.
    StepInfo step(SimState& s, const Increments& inc);
    StepInfo step(SimState& s, WienerDriver& driver) { return step(s, driver.sample(params_.dt)); }

private:
    DirectorField residual_w(const DirectorField& d) const;

    Grid grid_;
    Params params_;
    NoiseOperator noise_;
    MagneticField h_;
    LerayProjector proj_;
};

}  // namespace selflow
