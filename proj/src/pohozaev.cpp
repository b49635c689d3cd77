#include "selflow/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selflow/dynamics.hpp"
#include "selflow/initial.hpp"
#include "selflow/operators.hpp"

namespace selflow {
namespace {

constexpr double pi = std::numbers::pi;

struct PolarRule {
    std::vector<double> rho, rho_w;  // radial nodes on [0, r] with weights incl. rho
    int n_theta;
};

PolarRule polar_rule(double r, int n_rho, int n_theta) {
    std::vector<double> x, w;
    gauss_legendre(n_rho, x, w);
    PolarRule p{{}, {}, n_theta};
    for (int k = 0; k < n_rho; ++k) {
        const double rho = 0.5 * r * (x[k] + 1.0);
        p.rho.push_back(rho);
        p.rho_w.push_back(0.5 * r * w[k] * rho);
    }
    return p;
}

void require_ball(const Grid& g, double x0, double y0, double r, double margin) {
    if (!(r > 0.0)) throw GeometryError("ball radius must be positive");
    if (g.is_periodic()) {
        if (2.0 * (r + margin) > std::min(g.lx(), g.ly()))
            throw GeometryError("ball does not fit in half the period");
        return;
    }
    if (x0 - r < margin - 1e-12 || y0 - r < margin - 1e-12 || x0 + r > g.lx() - margin + 1e-12 ||
        y0 + r > g.ly() - margin + 1e-12)
        throw GeometryError("ball is not contained in the domain interior");
}

Vec2 multiplier_value(Multiplier m, double dx, double dy) {
    switch (m) {
        case Multiplier::radial: return {dx, dy};
        case Multiplier::first_axis: return {dx, 0.0};
        case Multiplier::shear: return {0.0, dx};
    }
    return {0.0, 0.0};
}

double multiplier_div(Multiplier m) {
    switch (m) {
        case Multiplier::radial: return 2.0;
        case Multiplier::first_axis: return 1.0;
        case Multiplier::shear: return 0.0;
    }
    return 0.0;
}

// sum_ij sigma_ij d_i X_j with sigma_ij = <d_i d, d_j d>
double stress_contraction(Multiplier m, const Vec3& d1, const Vec3& d2) {
    switch (m) {
        case Multiplier::radial: return dot(d1, d1) + dot(d2, d2);
        case Multiplier::first_axis: return dot(d1, d1);
        case Multiplier::shear: return dot(d1, d2);
    }
    return 0.0;
}

}  // namespace

std::string to_string(Multiplier m) {
    switch (m) {
        case Multiplier::radial: return "radial";
        case Multiplier::first_axis: return "first_axis";
        case Multiplier::shear: return "shear";
    }
    return "?";
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

ScalarField energy_density(const DirectorField& d, double eps) {
    const auto g = gradient(d, d.grid().director_boundary());
    ScalarField e = penalty_density(d, eps);
    for (std::size_t n = 0; n < d.size(); ++n)
        e[n][0] += 0.5 * (norm_sq(g.dx[n]) + norm_sq(g.dy[n]));
    return e;
}

PohozaevReport pohozaev_residual(const DirectorField& d, double eps, double x0, double y0,
                                 double r, Multiplier multiplier) {
    const Grid& g = d.grid();
    require_ball(g, x0, y0, r, g.h_min());
    const auto grad = gradient(d, g.director_boundary());
    DirectorField tau = laplacian(d, g.director_boundary());
    tau -= gl_force(d, eps);
    const ScalarField e = energy_density(d, eps);

    const int n_theta = std::max(128, static_cast<int>(std::ceil(8.0 * pi * r / g.h_min())));
    const PolarRule rule = polar_rule(r, 32, n_theta);
    const double dtheta = 2.0 * pi / n_theta;
    const double divx = multiplier_div(multiplier);

    PohozaevReport rep;
    rep.x0 = x0;
    rep.y0 = y0;
    rep.r = r;
    rep.multiplier = multiplier;

    for (int k = 0; k < n_theta; ++k) {
        const double th = (k + 0.5) * dtheta;
        const double c = std::cos(th), s = std::sin(th);
        for (std::size_t q = 0; q < rule.rho.size(); ++q) {
            const double dx = rule.rho[q] * c, dy = rule.rho[q] * s;
            const double x = x0 + dx, y = y0 + dy;
            const double w = rule.rho_w[q] * dtheta;
            const Vec3 d1 = interpolate(grad.dx, x, y);
            const Vec3 d2 = interpolate(grad.dy, x, y);
            const Vec2 X = multiplier_value(multiplier, dx, dy);
            const Vec3 xgrad = X[0] * d1 + X[1] * d2;
            rep.stress_bulk -= w * stress_contraction(multiplier, d1, d2);
            rep.energy_bulk += w * divx * interpolate(e, x, y)[0];
            rep.rhs += w * dot(xgrad, interpolate(tau, x, y));
        }
        // circle
        const double dx = r * c, dy = r * s;
        const double x = x0 + dx, y = y0 + dy;
        const double w = r * dtheta;
        const Vec3 d1 = interpolate(grad.dx, x, y);
        const Vec3 d2 = interpolate(grad.dy, x, y);
        const Vec2 X = multiplier_value(multiplier, dx, dy);
        const Vec3 xgrad = X[0] * d1 + X[1] * d2;
        const Vec3 dnu = c * d1 + s * d2;
        rep.boundary_flux += w * dot(xgrad, dnu);
        rep.energy_flux -= w * interpolate(e, x, y)[0] * (X[0] * c + X[1] * s);
    }
    rep.residual =
        rep.boundary_flux + rep.stress_bulk + rep.energy_bulk + rep.energy_flux - rep.rhs;
    return rep;
}

double local_energy(const ScalarField& density, double x0, double y0, double r) {
    const Grid& g = density.grid();
    require_ball(g, x0, y0, r, 0.0);
    const int n_theta = std::max(48, static_cast<int>(std::ceil(4.0 * pi * r / g.h_min())));
    const int n_rho = std::max(12, static_cast<int>(std::ceil(r / g.h_min())));
    const PolarRule rule = polar_rule(r, n_rho, n_theta);
    const double dtheta = 2.0 * pi / n_theta;
    double sum = 0.0;
    for (int k = 0; k < n_theta; ++k) {
        const double th = (k + 0.5) * dtheta;
        const double c = std::cos(th), s = std::sin(th);
        for (std::size_t q = 0; q < rule.rho.size(); ++q)
            sum += rule.rho_w[q] * interpolate(density, x0 + rule.rho[q] * c, y0 + rule.rho[q] * s)[0];
    }
    return sum * dtheta;
}

double local_energy(const DirectorField& d, double eps, double x0, double y0, double r) {
    return local_energy(energy_density(d, eps), x0, y0, r);
}

DefectReport defect_detect(const DirectorField& d, double eps, double r, double delta0_sq,
                           int stride) {
    const Grid& g = d.grid();
    if (!(r > 0.0)) throw ArgumentError("defect radius must be positive");
    if (stride <= 0) stride = std::max(1, static_cast<int>(r / (4.0 * g.h_min())));
    const ScalarField e = energy_density(d, eps);

    // admissible centre index range
    int i_lo = 0, i_hi = g.nx() - 1, j_lo = 0, j_hi = g.ny() - 1;
    if (!g.is_periodic()) {
        i_lo = static_cast<int>(std::ceil(r / g.hx() - 1e-9));
        j_lo = static_cast<int>(std::ceil(r / g.hy() - 1e-9));
        i_hi = g.nx() - 1 - i_lo;
        j_hi = g.ny() - 1 - j_lo;
    } else {
        require_ball(g, 0.0, 0.0, r, 0.0);
    }
    DefectReport rep;
    rep.r = r;
    rep.threshold = delta0_sq;
    if (i_lo > i_hi || j_lo > j_hi) return rep;

    const auto wrap_ok = [&](int i, int j) {
        if (g.is_periodic()) return true;
        return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
    };
    const auto norm_i = [&](int i) { return ((i % g.nx()) + g.nx()) % g.nx(); };
    const auto norm_j = [&](int j) { return ((j % g.ny()) + g.ny()) % g.ny(); };
    std::vector<double> cache(g.size(), -1.0);
    const auto energy_at = [&](int i, int j) {
        double& c = cache[g.index(norm_i(i), norm_j(j))];
        if (c < 0.0) c = local_energy(e, g.x(norm_i(i)), g.y(norm_j(j)), r);
        return c;
    };

    // lattice local maxima
    std::vector<std::pair<int, int>> lattice;
    for (int j = j_lo; j <= j_hi; j += stride)
        for (int i = i_lo; i <= i_hi; i += stride) lattice.emplace_back(i, j);
    std::vector<std::pair<int, int>> candidates;
    for (auto [i, j] : lattice) {
        const double ec = energy_at(i, j);
        bool is_max = true;
        for (int dj = -stride; dj <= stride && is_max; dj += stride)
            for (int di = -stride; di <= stride && is_max; di += stride) {
                if ((di == 0 && dj == 0) || !wrap_ok(i + di, j + dj)) continue;
                const double en = energy_at(i + di, j + dj);
                // ties broken by lattice order so plateaus yield one candidate
                if (en > ec || (en == ec && (dj < 0 || (dj == 0 && di < 0)))) is_max = false;
            }
        if (is_max) candidates.emplace_back(i, j);
    }
    // refine on the node grid
    std::vector<DefectCenter> refined;
    for (auto [i, j] : candidates) {
        for (;;) {
            int bi = i, bj = j;
            double best = energy_at(i, j);
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (!wrap_ok(i + di, j + dj)) continue;
                    const double en = energy_at(i + di, j + dj);
                    if (en > best) {
                        best = en;
                        bi = i + di;
                        bj = j + dj;
                    }
                }
            if (bi == i && bj == j) break;
            i = bi;
            j = bj;
        }
        refined.push_back({g.x(norm_i(i)), g.y(norm_j(j)), energy_at(i, j)});
    }
    std::stable_sort(refined.begin(), refined.end(),
                     [](const DefectCenter& a, const DefectCenter& b) { return a.energy > b.energy; });
    const auto distance = [&](const DefectCenter& a, const DefectCenter& b) {
        double dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
        if (g.is_periodic()) {
            dx = std::min(dx, g.lx() - dx);
            dy = std::min(dy, g.ly() - dy);
        }
        return std::hypot(dx, dy);
    };
    for (const auto& c : refined) {
        if (!(c.energy > delta0_sq)) break;
        const bool separate = std::all_of(rep.centers.begin(), rep.centers.end(),
                                          [&](const DefectCenter& a) { return distance(a, c) >= 2.0 * r; });
        if (separate) rep.centers.push_back(c);
    }
    return rep;
}

double default_defect_threshold(const Grid& grid, double eps) {
    const double h = grid.h_min();
    const double core = std::max(eps, 2.0 * h);
    const double xc = 0.5 * grid.lx(), yc = 0.5 * grid.ly();
    const DirectorField v = vortex_director(grid, xc, yc, core);
    return 0.3 * local_energy(v, eps, xc, yc, default_defect_radius(grid));
}

}  // namespace selflow
