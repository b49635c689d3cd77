#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "selflow/initial.hpp"
#include "selflow/operators.hpp"
#include "selflow/pohozaev.hpp"
#include "selflow/rng.hpp"
#include "selflow/workflows.hpp"

namespace selflow {
namespace {

constexpr double pi = std::numbers::pi;

VectorField random_field(const Grid& g, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    VectorField v(g);
    for (auto& x : v.values()) x = {nd(rng), nd(rng)};
    if (!g.is_periodic())
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.on_boundary(i, j)) v(i, j) = {0.0, 0.0};
    return v;
}

DirectorField random_director(const Grid& g, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    DirectorField d(g);
    for (auto& x : d.values()) x = {nd(rng), nd(rng), nd(rng)};
    return d;
}

Problem fixture(double xi) {
    RunConfig c;
    c.nx = c.ny = 16;
    c.T = 0.004;
    c.eps = 0.2;
    c.modes = 4;
    c.xi1 = c.xi2 = xi;
    c.init_u = "taylor-green:1,1";
    c.init_d = "texture:0.5";
    c.field_h = "const:0.3,0,1";
    return build_problem(c);
}

struct Check {
    const char* name;
    std::function<bool()> run;
};

std::vector<Check> checks() {
    return {
        {"philox known answer",
         [] {
             const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
             return out == Philox4x32::counter_type{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
         }},
        {"periodic projection is divergence-free",
         [] {
             std::mt19937 rng(1);
             const Grid g = Grid::periodic(32, 32);
             return projection_divergence(leray_project(random_field(g, rng), 1e-10).u).max_abs() <= 1e-10;
         }},
        {"no-slip projection is divergence-free",
         [] {
             const Grid g = Grid::bounded(33, 33);
             const VectorField v = VectorField::from_function(g, [](double x, double y) {
                 return Vec2{std::sin(pi * x) * std::sin(pi * y), x * (1 - x) * y * (1 - y)};
             });
             return projection_divergence(leray_project(v, 1e-10).u).max_abs() <= 1e-10;
         }},
        {"projection is idempotent",
         [] {
             std::mt19937 rng(2);
             const Grid g = Grid::periodic(32, 32);
             const VectorField p1 = leray_project(random_field(g, rng), 1e-12).u;
             const VectorField p2 = leray_project(p1, 1e-12).u;
             return norm_l2(p2 - p1) <= 1e-12 * (1.0 + norm_l2(p1));
         }},
        {"advection is skew on divergence-free velocity",
         [] {
             std::mt19937 rng(3);
             const Grid g = Grid::periodic(32, 32);
             const VectorField u = leray_project(random_field(g, rng), 1e-12).u;
             const DirectorField f = random_director(g, rng);
             return std::abs(inner_product(advect(u, f), f)) <= 1e-10 * norm_l2(u) * inner_product(f, f);
         }},
        {"advect_adjoint is the adjoint of advect",
         [] {
             std::mt19937 rng(4);
             const Grid g = Grid::bounded(24, 20);
             const VectorField u = random_field(g, rng);
             const DirectorField f = random_director(g, rng), w = random_director(g, rng);
             const double lhs = inner_product(advect(u, f), w);
             const double rhs = inner_product(u, advect_adjoint(f, w));
             return std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs));
         }},
        {"director noise is tangent to the sphere",
         [] {
             std::mt19937 rng(5);
             std::normal_distribution<double> nd;
             for (int k = 0; k < 1000; ++k) {
                 const Vec3 d{nd(rng), nd(rng), nd(rng)}, h{nd(rng), nd(rng), nd(rng)};
                 const Vec3 dh = cross(d, h);
                 const double scale = norm_sq(d) * norm_sq(h);
                 if (std::abs(dot(dh, d)) > 1e-14 * scale) return false;
                 if (std::abs(dot(cross(dh, h), d) + norm_sq(dh)) > 1e-14 * scale * (1 + norm_sq(h)))
                     return false;
             }
             return true;
         }},
        {"noise-free energy is nonincreasing",
         [] {
             const Problem pb = fixture(0.0);
             PathOptions opt;
             opt.checkpoint_every = 1;
             const PathResult r = run_path(pb, 1, opt);
             for (std::size_t c = 1; c < r.checkpoints.size(); ++c)
                 if (r.checkpoints[c].total > r.checkpoints[c - 1].total) return false;
             return true;
         }},
        {"noise-free energy budget closes to first order",
         [] {
             Problem pb = fixture(0.0);
             PathOptions opt;
             opt.budget = true;
             const double r1 = std::abs(*run_path(pb, 1, opt).budget_residual);
             pb.params.dt /= 2;
             pb.steps *= 2;
             const double r2 = std::abs(*run_path(pb, 1, opt).budget_residual);
             return r2 < 0.7 * r1;
         }},
        {"pohozaev residual vanishes for a helix",
         [] {
             const Grid g = Grid::periodic(64, 64);
             const DirectorField d = DirectorField::from_function(g, [](double x, double) {
                 return Vec3{std::cos(2 * pi * x), std::sin(2 * pi * x), 0.0};
             });
             return std::abs(pohozaev_residual(d, 0.2, 0.5, 0.5, 0.3, Multiplier::shear).residual) < 1e-12;
         }},
        {"defects: one vortex, one centre",
         [] {
             const Grid g = Grid::bounded(129, 129, DirectorBc::neumann, 2.0, 2.0);
             const double eps = 0.05, h = g.hx(), xc = 0.6 + 0.3 * h, yc = 0.9;
             const DirectorField d = vortex_director(g, xc, yc, 2 * h);
             const DefectReport rep =
                 defect_detect(d, eps, default_defect_radius(g), default_defect_threshold(g, eps));
             return rep.count() == 1 && std::hypot(rep.centers[0].x - xc, rep.centers[0].y - yc) <= 2 * h;
         }},
        {"defects: uniform director, none",
         [] {
             const Grid g = Grid::bounded(65, 65);
             const DirectorField d(g, Vec3{0, 1, 0});
             return defect_detect(d, 0.05, default_defect_radius(g), default_defect_threshold(g, 0.05))
                        .count() == 0;
         }},
        {"configuration round-trips",
         [] {
             RunConfig c;
             c.eps = 0.0371;
             c.dt = 2.5e-5;
             c.sweep_eps = {0.3, 0.2};
             return parse_config(c.canonical()) == c;
         }},
        {"ensembles ignore execution order",
         [] {
             const Problem pb = fixture(1.0);
             EnsembleSpec spec;
             spec.paths = 4;
             const EnsembleStats a = run_ensemble(pb, spec).stats;
             spec.threads = 2;
             spec.order = {3, 1, 0, 2};
             return run_ensemble(pb, spec).stats == a;
         }},
    };
}

}  // namespace

bool run_selftest(std::ostream& os) {
    bool all = true;
    for (const Check& c : checks()) {
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            os << "error in " << c.name << ": " << e.what() << "\n";
        }
        os << (ok ? "ok   " : "FAIL ") << c.name << "\n";
        all = all && ok;
    }
    return all;
}

}  // namespace selflow
