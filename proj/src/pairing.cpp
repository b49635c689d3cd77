#include "selflow/pairing.hpp"

#include <cmath>
#include <numbers>

#include "selflow/operators.hpp"

namespace selflow {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double weighted_sum(const Grid& g, auto&& f) {
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) s += g.weight(i, j) * f(g.index(i, j));
    return s;
}

}  // namespace

Field<3> traceless_stress(const DirectorField& d) {
    const auto g = gradient(d, d.grid().director_boundary());
    Field<3> out(d.grid());
    for (std::size_t n = 0; n < d.size(); ++n) {
        const double xx = 0.5 * (norm_sq(g.dx[n]) - norm_sq(g.dy[n]));
        out[n] = {xx, dot(g.dx[n], g.dy[n]), -xx};
    }
    return out;
}

VelocityTest stream_test_from(const ScalarField& s, std::string name) {
    const Grid& g = s.grid();
    VectorField phi(g);
    const int nx = g.nx(), ny = g.ny();
    const auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!g.is_periodic() && g.on_boundary(i, j)) continue;
            const double dsx = (s(wrap(i + 1, nx), j)[0] - s(wrap(i - 1, nx), j)[0]) / (2.0 * g.hx());
            const double dsy = (s(i, wrap(j + 1, ny))[0] - s(i, wrap(j - 1, ny))[0]) / (2.0 * g.hy());
            phi(i, j) = {dsy, -dsx};
        }
    }
    return {std::move(name), std::move(phi)};
}

std::vector<VelocityTest> default_velocity_tests(const Grid& g) {
    const double lx = g.lx(), ly = g.ly();
    std::vector<VelocityTest> out;
    if (g.is_periodic()) {
        const double kx = two_pi / lx, ky = two_pi / ly;
        out.push_back(stream_test(g, "cellular", [=](double x, double y) {
            return std::sin(kx * x) * std::sin(ky * y) / kx;
        }));
        out.push_back(stream_test(g, "shear", [=](double x, double) {
            return std::cos(kx * x) / kx;
        }));
        out.push_back(stream_test(g, "oblique", [=](double x, double y) {
            return std::sin(kx * x + 2.0 * ky * y) / kx;
        }));
    } else {
        // b vanishes with its normal derivative on the walls
        const auto b = [=](double x, double y) {
            const double sx = std::sin(std::numbers::pi * x / lx);
            const double sy = std::sin(std::numbers::pi * y / ly);
            return sx * sx * sx * sx * sy * sy * sy * sy;
        };
        out.push_back(stream_test(g, "bump", [=](double x, double y) { return b(x, y) / 10.0; }));
        out.push_back(stream_test(g, "bump-x", [=](double x, double y) {
            return b(x, y) * std::cos(two_pi * x / lx) / 10.0;
        }));
        out.push_back(stream_test(g, "bump-y", [=](double x, double y) {
            return b(x, y) * std::sin(two_pi * y / ly) / 10.0;
        }));
    }
    return out;
}

std::vector<DirectorTest> default_director_tests(const Grid& g) {
    const double m = g.is_periodic() ? two_pi : std::numbers::pi;
    const double kx = m / g.lx(), ky = m / g.ly();
    std::vector<DirectorTest> out;
    out.push_back({"cos-x", DirectorField::from_function(g, [=](double x, double) {
                       return Vec3{std::cos(kx * x), 0.0, 0.0};
                   })});
    out.push_back({"cos-y", DirectorField::from_function(g, [=](double, double y) {
                       return Vec3{0.0, std::cos(ky * y), 0.0};
                   })});
    out.push_back({"mixed", DirectorField::from_function(g, [=](double x, double y) {
                       return Vec3{0.0, 0.0, std::cos(kx * x) * std::cos(ky * y)};
                   })});
    return out;
}

double stress_pairing(const Field<3>& t, const FieldGradient<2>& gp) {
    t.require_same_grid(gp.dx);
    return weighted_sum(t.grid(), [&](std::size_t n) {
        return t[n][0] * (gp.dx[n][0] - gp.dy[n][1]) + t[n][1] * (gp.dy[n][0] + gp.dx[n][1]);
    });
}

PairingParts stress_pairing_parts(const DirectorField& d, const VectorField& phi) {
    d.require_same_grid(phi);
    const Field<3> t = traceless_stress(d);
    const auto gp = gradient(phi, phi.grid().velocity_boundary());
    PairingParts out;
    out.diagonal = weighted_sum(d.grid(), [&](std::size_t n) {
        return t[n][0] * (gp.dx[n][0] - gp.dy[n][1]);
    });
    out.off_diagonal = weighted_sum(d.grid(), [&](std::size_t n) {
        return t[n][1] * (gp.dy[n][0] + gp.dx[n][1]);
    });
    return out;
}

double stress_pairing(const DirectorField& d, const VelocityTest& phi, double tol) {
    const double div = projection_divergence(phi.phi).max_abs();
    if (div > tol)
        throw ArgumentError("test function '" + phi.name + "' is not divergence-free");
    const PairingParts parts = stress_pairing_parts(d, phi.phi);
    return parts.diagonal + parts.off_diagonal;
}

WeakFormTracker::WeakFormTracker(const SimState& initial, const Params& params,
                                 const MagneticField& h, std::vector<VelocityTest> u_tests,
                                 std::vector<DirectorTest> d_tests)
    : p_(params),
      h_(h.h),
      u0_(initial.u),
      d0_(initial.d),
      u_tests_(std::move(u_tests)),
      d_tests_(std::move(d_tests)) {
    const Grid& g = u0_.grid();
    for (const auto& t : u_tests_) {
        t.phi.require_same_grid(g);
        if (projection_divergence(t.phi).max_abs() > params.proj_tol)
            throw ArgumentError("test function '" + t.name + "' is not divergence-free");
        grad_phi_.push_back(gradient(t.phi, g.velocity_boundary()));
        lap_phi_.push_back(laplacian(t.phi, g.velocity_boundary()));
    }
    for (const auto& t : d_tests_) {
        t.psi.require_same_grid(g);
        grad_psi_.push_back(gradient(t.psi, g.director_boundary()));
        lap_psi_.push_back(laplacian(t.psi, g.director_boundary()));
    }
    acc_u_.assign(u_tests_.size(), 0.0);
    acc_d_.assign(d_tests_.size(), 0.0);
}

void WeakFormTracker::observe(const SimState& s, const Increments& inc, const NoiseOperator& noise) {
    const Grid& g = s.u.grid();
    const double dt = p_.dt;
    if (!u_tests_.empty()) {
        const Field<3> t = traceless_stress(s.d);
        VectorField raw(g);
        const bool noisy = p_.xi1 != 0.0 && noise.modes() > 0;
        // phi is divergence-free, so pairing with the unprojected noise is exact
        if (noisy) raw = noise.unprojected(s.u, inc.db);
        for (std::size_t k = 0; k < u_tests_.size(); ++k) {
            const auto& gp = grad_phi_[k];
            const double drift = weighted_sum(g, [&](std::size_t n) {
                const Vec2& u = s.u[n];
                const double conv = u[0] * (u[0] * gp.dx[n][0] + u[1] * gp.dy[n][0]) +
                                    u[1] * (u[0] * gp.dx[n][1] + u[1] * gp.dy[n][1]);
                const double visc = p_.mu * dot(u, lap_phi_[k][n]);
                const double stress = t[n][0] * (gp.dx[n][0] - gp.dy[n][1]) +
                                      t[n][1] * (gp.dy[n][0] + gp.dx[n][1]);
                return conv + visc + p_.lambda * stress;
            });
            acc_u_[k] += dt * drift;
            if (noisy) acc_u_[k] += p_.xi1 * inner_product(u_tests_[k].phi, raw);
        }
    }
    if (!d_tests_.empty()) {
        const DirectorField f = gl_force(s.d, p_.eps);
        for (std::size_t k = 0; k < d_tests_.size(); ++k) {
            const auto& gp = grad_psi_[k];
            const DirectorField& psi = d_tests_[k].psi;
            const double drift = weighted_sum(g, [&](std::size_t n) {
                const Vec3& d = s.d[n];
                const Vec3 dxh = cross(d, h_[n]);
                const double conv = s.u[n][0] * dot(d, gp.dx[n]) + s.u[n][1] * dot(d, gp.dy[n]);
                return conv + p_.gamma * (dot(d, lap_psi_[k][n]) - dot(f[n], psi[n])) +
                       0.5 * p_.xi2 * p_.xi2 * dot(cross(dxh, h_[n]), psi[n]);
            });
            const double mart = weighted_sum(g, [&](std::size_t n) {
                return dot(psi[n], cross(s.d[n], h_[n]));
            });
            acc_d_[k] += dt * drift + p_.xi2 * mart * inc.dw2;
        }
    }
}

std::vector<double> WeakFormTracker::residual_u(const SimState& now) const {
    std::vector<double> out;
    VectorField du = now.u - u0_;
    for (std::size_t k = 0; k < u_tests_.size(); ++k)
        out.push_back(inner_product(du, u_tests_[k].phi) - acc_u_[k]);
    return out;
}

std::vector<double> WeakFormTracker::residual_d(const SimState& now) const {
    std::vector<double> out;
    DirectorField dd = now.d - d0_;
    for (std::size_t k = 0; k < d_tests_.size(); ++k)
        out.push_back(inner_product(dd, d_tests_[k].psi) - acc_d_[k]);
    return out;
}

}  // namespace selflow
