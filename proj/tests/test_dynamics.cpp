#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "selflow/dynamics.hpp"
#include "selflow/energy.hpp"
#include "selflow/initial.hpp"
#include "selflow/operators.hpp"

using namespace selflow;
constexpr double pi = std::numbers::pi;

namespace {

Params quiet(double eps, double dt) {
    Params p;
    p.eps = eps;
    p.xi1 = 0.0;
    p.xi2 = 0.0;
    p.dt = dt;
    return p;
}

Stepper make_stepper(const Grid& g, Params p, Vec3 h = {0, 0, 1}, NoiseSpec spec = {}) {
    return Stepper(g, p, NoiseOperator(g, spec), MagneticField::constant(g, h));
}

}  // namespace

TEST_CASE("Ginzburg-Landau force and penalty") {
    const Grid g = Grid::periodic(4, 4);
    CHECK(gl_force(DirectorField(g, Vec3{0, 0, 1}), 0.3).max_abs() == 0.0);
    CHECK(gl_force(DirectorField(g), 0.3).max_abs() == 0.0);
    CHECK(gl_force(DirectorField(g, Vec3{2, 0, 0}), 1.0)[0] == Vec3{6, 0, 0});
    CHECK_THROWS_AS(gl_force(DirectorField(g), 0.0), ArgumentError);
    CHECK(penalty_density(DirectorField(g, Vec3{0, 1, 0}), 0.5).max_abs() == 0.0);
    CHECK(penalty_density(DirectorField(g), 1.0)[0][0] == 0.25);

    std::mt19937 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    const Grid one = Grid::periodic(4, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 d{n(rng), n(rng), n(rng)};
        const double eps = 0.3 + 0.5 * std::abs(n(rng));
        const Vec3 f = gl_force(DirectorField(one, d), eps)[0];
        for (int c = 0; c < 3; ++c) {
            const double step = 1e-5 * (1.0 + std::abs(d[c]));
            Vec3 a = d, b = d;
            a[c] += step;
            b[c] -= step;
            const double fd = (penalty_density(DirectorField(one, a), eps)[0][0] -
                               penalty_density(DirectorField(one, b), eps)[0][0]) /
                              (2.0 * step);
            CHECK(fd == doctest::Approx(f[c]).epsilon(1e-6).scale(1.0 + std::abs(f[c])));
        }
    }
}

TEST_CASE("stratonovich correction and triple products") {
    const Grid g = Grid::periodic(4, 4);
    const DirectorField h(g, Vec3{0, 0, 1});
    CHECK(strat_correction(DirectorField(g, Vec3{1, 0, 0}), h, 1.0)[0] == Vec3{-0.5, 0, 0});
    CHECK(strat_correction(h, h, 1.0).max_abs() == 0.0);
    std::mt19937 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    DirectorField d(g), hr(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        d[k] = {n(rng), n(rng), n(rng)};
        hr[k] = {n(rng), n(rng), n(rng)};
    }
    const double xi2 = 1.3;
    const DirectorField c = strat_correction(d, hr, xi2);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double expect = -0.5 * xi2 * xi2 * norm_sq(cross(d[k], hr[k]));
        CHECK(dot(c[k], d[k]) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("ericksen stress") {
    const Grid g = Grid::periodic(64, 64);
    CHECK(ericksen_stress_div(DirectorField(g, Vec3{0, 0, 1})).max_abs() == 0.0);
    const double k = 2 * pi;
    const DirectorField d = DirectorField::from_function(g, [&](double x, double) {
        return Vec3{std::cos(k * x), std::sin(k * x), 0.0};
    });
    const Field<3> t = ericksen_tensor(d);
    const double kh = std::sin(k * g.hx()) / g.hx();  // discrete wavenumber
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(t[n][0] == doctest::Approx(kh * kh).epsilon(1e-12));
        CHECK(std::abs(t[n][1]) < 1e-12);
        CHECK(std::abs(t[n][2]) < 1e-12);
    }
    CHECK(ericksen_stress_div(d).max_abs() < 1e-9);
    CHECK(kh * kh == doctest::Approx(k * k).epsilon(0.01));

    // <div s, phi> = -<s, grad phi> on a bounded grid for compactly supported phi
    for (int n : {33, 65, 129}) {
        const Grid b = Grid::bounded(n, n);
        const DirectorField dd = DirectorField::from_function(b, [](double x, double y) {
            return Vec3{std::cos(x + 2 * y), std::sin(x * y), x};
        });
        const VectorField phi = VectorField::from_function(b, [](double x, double y) {
            const double s = std::pow(std::sin(pi * x) * std::sin(pi * y), 4);
            return Vec2{s * std::cos(3 * y), s * x};
        });
        const Field<3> s = ericksen_tensor(dd);
        const auto gp = gradient(phi, Boundary::fixed);
        double rhs = 0.0;
        for (int j = 0; j < b.ny(); ++j)
            for (int i = 0; i < b.nx(); ++i) {
                const std::size_t m = b.index(i, j);
                rhs += b.weight(i, j) * (s[m][0] * gp.dx[m][0] + s[m][1] * (gp.dy[m][0] + gp.dx[m][1]) +
                                         s[m][2] * gp.dy[m][1]);
            }
        const double err = std::abs(inner_product(ericksen_stress_div(dd), phi) + rhs);
        // central differences are exactly skew-adjoint away from the boundary
        CHECK(err <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("stability bound") {
    const Grid g = Grid::bounded(11, 11);  // h = 0.1
    CHECK(stability_dt(0.01, g, 1.0, 1.0) == doctest::Approx(2.5e-5));
    CHECK(stability_dt(1.0, g, 100.0, 1.0) == doctest::Approx(0.01 / 800.0));
    CHECK(stability_dt(1.0, g, 0.01, 0.01, 1000.0) == doctest::Approx(0.05 / 1000.0));
    Params p = quiet(0.01, 1e-3);
    Stepper s = make_stepper(g, p);
    CHECK_THROWS_AS(s.check_stability(VectorField(g)), StabilityError);
    p.allow_unstable_dt = true;
    make_stepper(g, p).check_stability(VectorField(g));
}

TEST_CASE("director step") {
    const Grid g = Grid::periodic(8, 8);
    SUBCASE("stationary unit director") {
        Params p = quiet(0.5, 1e-3);
        Stepper st = make_stepper(g, p);
        SimState s(VectorField(g), DirectorField(g, Vec3{0.6, 0.8, 0.0}));
        CHECK(st.step_director(s, 0.0) == s.d);
    }
    SUBCASE("hand-evaluated heat-flow step") {
        Params p = quiet(1.0, 0.01);
        Stepper st = make_stepper(g, p, {0, 0, 0});
        SimState s(VectorField(g), DirectorField(g, Vec3{2, 0, 0}));
        const DirectorField d = st.step_director(s, 0.0);
        CHECK(d[5][0] == doctest::Approx(1.94).epsilon(1e-14));
        CHECK(d[5][1] == 0.0);
    }
    SUBCASE("generator of |d|^2/2 vanishes on the sphere") {
        std::mt19937 rng(3);
        std::normal_distribution<double> n(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            Vec3 d{n(rng), n(rng), n(rng)}, h{n(rng), n(rng), n(rng)};
            d = (1.0 / std::sqrt(norm_sq(d))) * d;
            const Vec3 dxh = cross(d, h);
            const double drift = dot(d, 0.5 * cross(dxh, h));
            const double ito = 0.5 * norm_sq(dxh);
            CHECK(std::abs(drift + ito) <= 1e-14 * (1.0 + norm_sq(h)));
        }
    }
}

TEST_CASE("velocity step") {
    const Grid g = Grid::periodic(16, 16);
    SUBCASE("rest state stays at rest") {
        Params p = quiet(0.5, 1e-4);
        Stepper st = make_stepper(g, p);
        SimState s(VectorField(g), DirectorField(g, Vec3{0, 0, 1}));
        CHECK(st.step_velocity(s, std::vector<double>(8, 0.0)).u.max_abs() == 0.0);
    }
    SUBCASE("noisy step stays divergence-free") {
        Params p = quiet(0.5, 1e-4);
        p.xi1 = 1.0;
        Stepper st(g, p, NoiseOperator(g, NoiseSpec{1, 1.0, 1.5}), MagneticField::constant(g, {0, 0, 1}));
        SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.5));
        const Projection r = st.step_velocity(s, std::vector<double>{0.01});
        CHECK(projection_divergence(r.u).max_abs() <= p.proj_tol);
    }
    SUBCASE("fused step matches the separate updates") {
        Params p;
        p.eps = 0.3;
        p.dt = 2e-4;
        Stepper st = make_stepper(g, p, {0.2, 0.1, 1.0});
        SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.8));
        WienerDriver w(5, 8);
        const Increments inc = w.sample(p.dt);
        const DirectorField d = st.step_director(s, inc.dw2);
        const VectorField u = st.step_velocity(s, inc.db).u;
        st.step(s, inc);
        CHECK((s.d - d).max_abs() < 1e-14);
        CHECK((s.u - u).max_abs() < 1e-14);
    }
}

TEST_CASE("Taylor-Green decay") {
    const Grid g = Grid::periodic(128, 128);
    Params p = quiet(1.0, 0.0);
    p.mu = 0.01;
    p.gamma = 0.01;
    p.dt = stability_dt(p.eps, g, p.mu, p.gamma, 0.05);
    const double k2 = 2.0 * 4.0 * pi * pi;
    const double rate = 2.0 * p.mu * k2;
    const double T = 1.0 / rate;
    const int steps = static_cast<int>(std::ceil(T / p.dt));
    p.dt = T / steps;
    Stepper st = make_stepper(g, p);
    SimState s(taylor_green(g, 1, 0.05), DirectorField(g, Vec3{0, 0, 1}));
    const double e0 = 0.5 * inner_product(s.u, s.u);
    for (int n = 0; n < steps; ++n) st.step(s, Increments{std::vector<double>(8, 0.0), 0.0});
    const double e1 = 0.5 * inner_product(s.u, s.u);
    CHECK(e1 / e0 == doctest::Approx(std::exp(-rate * T)).epsilon(0.02));
}

TEST_CASE("coupled step") {
    const Grid g = Grid::periodic(16, 16);
    SUBCASE("noise-free ledgers stay zero") {
        Params p = quiet(0.3, 1e-4);
        Stepper st = make_stepper(g, p);
        SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.8));
        WienerDriver w(1, 8);
        for (int n = 0; n < 10; ++n) st.step(s, w);
        CHECK(s.ledger1 == 0.0);
        CHECK(s.ledger2 == 0.0);
        CHECK(s.step == 10);
        CHECK(s.t == doctest::Approx(1e-3));
    }
    SUBCASE("same seed, same path") {
        Params p;
        p.eps = 0.3;
        p.dt = 1e-4;
        auto run = [&] {
            Stepper st = make_stepper(g, p);
            SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.8));
            WienerDriver w(99, 8);
            for (int n = 0; n < 20; ++n) st.step(s, w);
            return s;
        };
        const SimState a = run(), b = run();
        CHECK(a.u == b.u);
        CHECK(a.d == b.d);
        CHECK(a.ledger1 == b.ledger1);
        CHECK(a.ledger2 == b.ledger2);
    }
    SUBCASE("blow-up is reported with the step") {
        Params p = quiet(0.05, 0.1);
        p.allow_unstable_dt = true;
        Stepper st = make_stepper(g, p);
        SimState s(VectorField(g), texture_director(g, 3.0));
        WienerDriver w(1, 8);
        bool thrown = false;
        try {
            for (int n = 0; n < 200; ++n) st.step(s, w);
        } catch (const BlowUpError& e) {
            thrown = true;
            CHECK(e.step() > 0);
        }
        CHECK(thrown);
    }
}

TEST_CASE("strong convergence under path-coupled refinement") {
    const Grid g = Grid::periodic(16, 16);
    Params p;
    p.eps = 0.5;
    p.mu = 0.5;
    p.gamma = 0.5;
    p.xi1 = 1.0;
    p.xi2 = 1.0;
    const double T = 0.05, dt_fine = 1.0 / 6400.0;
    auto run = [&](int level) {
        Params q = p;
        q.dt = dt_fine * level;
        Stepper st = make_stepper(g, q, {0.0, 0.3, 0.6}, NoiseSpec{4, 0.5, 1.5});
        SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.8));
        WienerDriver w(314, 4, level);
        const int steps = static_cast<int>(std::lround(T / q.dt));
        for (int n = 0; n < steps; ++n) st.step(s, w);
        return s;
    };
    const SimState ref = run(1);
    auto err = [&](const SimState& s) {
        return std::sqrt(inner_product(s.u - ref.u, s.u - ref.u) +
                         inner_product(s.d - ref.d, s.d - ref.d));
    };
    const double e8 = err(run(8)), e4 = err(run(4)), e2 = err(run(2));
    const double order = std::log2(e8 / e2) / 2.0;
    MESSAGE("strong errors ", e8, " ", e4, " ", e2, " order ", order);
    CHECK(e4 < e8);
    CHECK(e2 < e4);
    CHECK(order >= 0.5);
}

TEST_CASE("noise-free energy is nonincreasing") {
    const Grid g = Grid::periodic(32, 32);
    Params p = quiet(0.2, 0.0);
    p.dt = stability_dt(p.eps, g, p.mu, p.gamma, 1.0);
    Stepper st = make_stepper(g, p);
    SimState s(taylor_green(g, 1, 0.5), texture_director(g, 0.8));
    double prev = total_energy(s, p);
    const double e0 = prev;
    double increase = 0.0;
    for (int n = 0; n < 200; ++n) {
        st.step(s, Increments{std::vector<double>(8, 0.0), 0.0});
        const double e = total_energy(s, p);
        increase += std::max(0.0, e - prev);
        prev = e;
    }
    CHECK(prev < e0);
    CHECK(increase <= 1e-6 * e0);
}
