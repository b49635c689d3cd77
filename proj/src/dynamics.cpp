#include "selflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "selflow/operators.hpp"

namespace selflow {

void Params::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ArgumentError(std::string(name) + " must be positive");
    };
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ArgumentError(std::string(name) + " must be non-negative");
    };
    positive(eps, "sim.eps");
    positive(mu, "sim.mu");
    positive(lambda, "sim.lambda");
    positive(gamma, "sim.gamma");
    nonneg(xi1, "noise.xi1");
    nonneg(xi2, "noise.xi2");
    positive(dt, "sim.dt");
    positive(T, "sim.T");
    positive(proj_tol, "proj_tol");
}

SimState::SimState(VectorField u0, DirectorField d0)
    : u(std::move(u0)), d(std::move(d0)), p(u.grid()) {
    d.require_same_grid(u);
}

DirectorField gl_force(const DirectorField& d, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    const double c = 1.0 / (eps * eps);
    return pointwise<3, 3>(d, [c](const Vec3& v) { return (c * (norm_sq(v) - 1.0)) * v; });
}

ScalarField penalty_density(const DirectorField& d, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    const double c = 0.25 / (eps * eps);
    return pointwise<3, 1>(d, [c](const Vec3& v) {
        const double a = 1.0 - norm_sq(v);
        return Vec<1>{c * a * a};
    });
}

DirectorField strat_correction(const DirectorField& d, const DirectorField& h, double xi2) {
    d.require_same_grid(h);
    DirectorField out(d.grid());
    const double c = 0.5 * xi2 * xi2;
    for (std::size_t n = 0; n < d.size(); ++n) out[n] = c * cross(cross(d[n], h[n]), h[n]);
    return out;
}

Field<3> ericksen_tensor(const DirectorField& d) {
    const auto g = gradient(d, d.grid().director_boundary());
    Field<3> out(d.grid());
    for (std::size_t n = 0; n < d.size(); ++n)
        out[n] = {dot(g.dx[n], g.dx[n]), dot(g.dx[n], g.dy[n]), dot(g.dy[n], g.dy[n])};
    return out;
}

VectorField ericksen_stress_div(const DirectorField& d) {
    const Field<3> s = ericksen_tensor(d);
    const Boundary rule = d.grid().is_periodic() ? Boundary::periodic : Boundary::fixed;
    const auto g = gradient(s, rule);
    VectorField out(d.grid());
    for (std::size_t n = 0; n < d.size(); ++n)
        out[n] = {g.dx[n][0] + g.dy[n][1], g.dx[n][1] + g.dy[n][2]};
    return out;
}

double stability_dt(double eps, const Grid& grid, double mu, double gamma, double u_max) {
    if (!(eps > 0.0) || !(mu > 0.0) || !(gamma > 0.0))
        throw ArgumentError("eps, mu and gamma must be positive");
    const double h = grid.h_min();
    double dt = std::min({h * h / (8.0 * mu), h * h / (8.0 * gamma), eps * eps / (4.0 * gamma)});
    if (u_max > 0.0) dt = std::min(dt, 0.5 * h / u_max);
    return dt;
}

Stepper::Stepper(const Grid& grid, Params params, NoiseOperator noise, MagneticField h)
    : grid_(grid),
      params_(params),
      noise_(std::move(noise)),
      h_(std::move(h)),
      proj_(grid, params.proj_tol) {
    params_.validate();
    if (!(noise_.grid() == grid_)) throw ShapeError("noise operator lives on a different grid");
    h_.h.require_same_grid(grid_);
}

void Stepper::check_stability(const VectorField& u) const {
    const double bound = stability_dt(params_.eps, grid_, params_.mu, params_.gamma, u.max_abs());
    if (params_.dt > bound && !params_.allow_unstable_dt)
        throw StabilityError("sim.dt " + std::to_string(params_.dt) +
                                 " exceeds the explicit stability bound " + std::to_string(bound),
                             params_.dt, bound);
}

DirectorField Stepper::residual_w(const DirectorField& d) const {
    DirectorField w = laplacian(d, grid_.director_boundary());
    w -= gl_force(d, params_.eps);
    return w;
}

DirectorField Stepper::step_director(const SimState& s, double dw2) const {
    const DirectorField w = residual_w(s.d);
    const DirectorField adv = advect(s.u, s.d);
    const double dt = params_.dt, g = params_.gamma, xi2 = params_.xi2;
    const double corr = 0.5 * xi2 * xi2;
    const bool fixed = grid_.director_boundary() == Boundary::fixed;
    DirectorField out = s.d;
    for (int j = 0; j < grid_.ny(); ++j) {
        for (int i = 0; i < grid_.nx(); ++i) {
            if (fixed && grid_.on_boundary(i, j)) continue;
            const std::size_t n = grid_.index(i, j);
            const Vec3 dxh = cross(s.d[n], h_.h[n]);
            const Vec3 drift = (g * w[n] - adv[n]) + corr * cross(dxh, h_.h[n]);
            out[n] = out[n] + (dt * drift + (xi2 * dw2) * dxh);
        }
    }
    return out;
}

Projection Stepper::step_velocity(const SimState& s, std::span<const double> db) {
    const DirectorField w = residual_w(s.d);
    VectorField ustar = s.u;
    VectorField rhs = laplacian(s.u, grid_.velocity_boundary());
    rhs *= params_.mu;
    rhs -= advect(s.u, s.u);
    rhs.axpy(-params_.lambda, advect_adjoint(s.d, w));
    ustar.axpy(params_.dt, rhs);
    if (params_.xi1 != 0.0 && noise_.modes() > 0)
        ustar.axpy(params_.xi1, noise_.apply(proj_, s.u, db));
    return proj_.project(ustar);
}

StepInfo Stepper::step(SimState& s, const Increments& inc) {
    const Params& pr = params_;
    StepInfo info;
    const Boundary vb = grid_.velocity_boundary();
    const bool fixed_d = grid_.director_boundary() == Boundary::fixed;

    DirectorField w = residual_w(s.d);
    if (fixed_d)
        for (int j = 0; j < grid_.ny(); ++j)
            for (int i = 0; i < grid_.nx(); ++i)
                if (grid_.on_boundary(i, j)) w(i, j) = {0.0, 0.0, 0.0};

    const VectorField adv_u = advect(s.u, s.u);
    info.dissipation_u = dirichlet_form(s.u, s.u, vb);
    info.dissipation_d = inner_product(w, w);
    info.transport_u = inner_product(adv_u, s.u);

    // director
    const DirectorField adv_d = advect(s.u, s.d);
    const double dt = pr.dt, corr = 0.5 * pr.xi2 * pr.xi2;
    DirectorField d_next = s.d;
    DirectorField dxh(grid_);
    for (int j = 0; j < grid_.ny(); ++j) {
        for (int i = 0; i < grid_.nx(); ++i) {
            const std::size_t n = grid_.index(i, j);
            dxh[n] = cross(s.d[n], h_.h[n]);
            if (fixed_d && grid_.on_boundary(i, j)) continue;
            const Vec3 drift = (pr.gamma * w[n] - adv_d[n]) + corr * cross(dxh[n], h_.h[n]);
            d_next[n] = d_next[n] + (dt * drift + (pr.xi2 * inc.dw2) * dxh[n]);
        }
    }
    if (pr.xi2 != 0.0) info.ledger2_increment = inner_product(dxh, w) * inc.dw2;

    // velocity
    VectorField rhs = laplacian(s.u, vb);
    rhs *= pr.mu;
    rhs -= adv_u;
    rhs.axpy(-pr.lambda, advect_adjoint(s.d, w));
    VectorField ustar = s.u;
    ustar.axpy(dt, rhs);
    if (noise_.modes() > 0 && pr.xi1 != 0.0) {
        const VectorField nu = noise_.apply(proj_, s.u, inc.db);
        info.ledger1_increment = inner_product(s.u, nu);
        ustar.axpy(pr.xi1, nu);
    }
    if (!ustar.all_finite() || !d_next.all_finite())
        throw BlowUpError("non-finite values at step " + std::to_string(s.step + 1) +
                              " (t = " + std::to_string(s.t + dt) + ")",
                          s.step + 1, s.t + dt);
    Projection pj = proj_.project(ustar);
    info.divergence = pj.divergence;

    s.u = std::move(pj.u);
    s.p = std::move(pj.p);
    s.d = std::move(d_next);
    s.ledger1 += info.ledger1_increment;
    s.ledger2 += info.ledger2_increment;
    s.t += dt;
    ++s.step;
    return info;
}

}  // namespace selflow
