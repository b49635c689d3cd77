// Acceptance criteria: one PASS/FAIL line per criterion.
// Run with criterion ids (e.g. `acceptance 2 7`) to select a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "selflow/ensemble.hpp"
#include "selflow/initial.hpp"
#include "selflow/operators.hpp"
#include "selflow/pohozaev.hpp"

using namespace selflow;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Problem problem(const std::string& text) { return build_problem(parse_config(text)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// least-squares slope of log|r| against log h, grids refined by 2
double observed_order(const std::vector<double>& r) {
    const double n = static_cast<double>(r.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double x = -static_cast<double>(k) * std::log(2.0), y = std::log(std::abs(r[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// criterion 1 run, shared with criteria 6 and 11
const char* deterministic_cfg =
    "sim.grid = 64 x 64\n"
    "sim.eps = 0.2\n"
    "sim.T = 0.05\n"
    "noise.xi1 = 0\n"
    "noise.xi2 = 0\n"
    "init.u = taylor-green:1,1\n"
    "init.d = texture:0.5\n"
    "out.checkpoint_every = 20\n";

struct DeterministicRun {
    Problem pb = problem(deterministic_cfg);
    PathResult result;
    double seconds = 0.0;
    DeterministicRun() {
        PathOptions opt;
        opt.checkpoint_every = pb.config.checkpoint_every;
        const auto t0 = std::chrono::steady_clock::now();
        result = run_path(pb, pb.config.seed, opt);
        seconds = seconds_since(t0);
    }
};

const DeterministicRun& deterministic_run() {
    static const DeterministicRun run;
    return run;
}

// criterion 3 ensemble, shared with criterion 12. A constant h would make
// ledger2 vanish identically, so the field varies in space.
const char* martingale_cfg =
    "sim.grid = 32 x 32\n"
    "sim.eps = 0.2\n"
    "sim.mu = 0.5\n"
    "sim.gamma = 0.5\n"
    "sim.T = 0.5\n"
    "noise.seed = 2024\n"
    "noise.modes = 8\n"
    "field.h = wave:0.5\n"
    "init.u = taylor-green:1,1\n"
    "init.d = texture:0.5\n"
    "ensemble.paths = 64\n"
    "out.checkpoint_every = 200\n";

EnsembleSpec martingale_spec(const Problem& pb) {
    EnsembleSpec spec;
    spec.paths = pb.config.paths;
    spec.base_seed = pb.config.seed;
    spec.options.checkpoint_every = pb.config.checkpoint_every;
    return spec;
}

struct MartingaleRun {
    Problem pb = problem(martingale_cfg);
    EnsembleResult result;
    double seconds = 0.0;
    MartingaleRun() {
        const auto t0 = std::chrono::steady_clock::now();
        result = run_ensemble(pb, martingale_spec(pb));
        seconds = seconds_since(t0);
    }
};

const MartingaleRun& martingale_run() {
    static const MartingaleRun run;
    return run;
}

// criteria 8 and 9 share one coupled sweep
const char* sweep_cfg =
    "sim.grid = 32 x 32\n"
    "sim.T = 0.1\n"
    "noise.seed = 7\n"
    "noise.modes = 8\n"
    "field.h = wave:0.5\n"
    "init.u = taylor-green:1,1\n"
    "init.d = skew-texture:0.5\n"
    "run.mode = sweep\n"
    "sweep.eps = 0.2, 0.1, 0.05\n"
    "ensemble.paths = 16\n"
    "out.checkpoint_every = 50\n";

struct SweepRun {
    Problem pb = problem(sweep_cfg);
    std::vector<VelocityTest> tests = default_velocity_tests(pb.grid);
    CoupledSweep result;
    double seconds = 0.0;
    SweepRun() {
        EnsembleSpec spec;
        spec.paths = pb.config.paths;
        spec.base_seed = pb.config.seed;
        spec.options.checkpoint_every = pb.config.checkpoint_every;
        const auto t0 = std::chrono::steady_clock::now();
        result = coupled_sweep(pb, spec, pb.config.sweep_eps, tests);
        seconds = seconds_since(t0);
    }
};

const SweepRun& sweep_run() {
    static const SweepRun run;
    return run;
}

Outcome c1_dissipation() {
    const DeterministicRun& run = deterministic_run();
    const auto& cp = run.result.checkpoints;
    double violation = 0.0;
    for (std::size_t c = 1; c < cp.size(); ++c) violation += std::max(0.0, cp[c].total - cp[c - 1].total);
    const double e0 = cp.front().total;
    const bool pass = violation <= 1e-6 * e0 && run.seconds <= 60.0;
    return {pass, fmt("E %.6g -> %.6g over %zu checkpoints, cumulative increase %.3g (limit %.3g), %.1f s (limit 60 s)",
                      e0, cp.back().total, cp.size(), violation, 1e-6 * e0, run.seconds)};
}

Outcome c2_budget() {
    const Problem pb = problem(
        "sim.grid = 32 x 32\n"
        "sim.eps = 0.2\n"
        "sim.T = 0.05\n"
        "noise.seed = 99\n"
        "noise.modes = 8\n"
        "field.h = wave:0.5\n"
        "init.u = taylor-green:1,1\n"
        "init.d = texture:0.5\n");
    std::vector<double> residual, dissipated;
    std::string levels;
    for (int level = 0; level < 3; ++level) {
        Params p = pb.params;
        const int refine = 1 << level;
        p.dt /= refine;
        Stepper st(pb.grid, p, NoiseOperator(pb.grid, pb.noise), pb.h);
        SimState s(pb.u0, pb.d0);
        // the finest step is dt0 / 4; coarser levels sum its increments
        WienerDriver w(pb.config.seed, pb.noise.modes, 4 / refine);
        BudgetAccumulator acc(p);
        acc.add(energy_record(s, st));
        for (std::size_t n = 0; n < pb.steps * refine; ++n) {
            st.step(s, w);
            acc.add(energy_record(s, st));
        }
        residual.push_back(std::abs(acc.residual()));
        dissipated.push_back(acc.dissipated());
        levels += fmt(" dt0/%d: %.3g", refine, residual.back());
    }
    const double order = observed_order(residual);
    const bool decreasing = residual[1] < residual[0] && residual[2] < residual[1];
    const double ratio = residual[2] / dissipated[2];
    return {decreasing && order >= 0.5 && ratio <= 0.05,
            fmt("residual%s, order %.2f (min 0.5), at dt0/4 %.2f%% of dissipated %.4g (max 5%%)", levels.c_str(),
                order, 100 * ratio, dissipated[2])};
}

Outcome c3_martingale() {
    const MartingaleRun& run = martingale_run();
    const RunningStats& l1 = run.result.stats.scalars.at("ledger1");
    const RunningStats& l2 = run.result.stats.scalars.at("ledger2");
    const bool pass = std::abs(l1.mean) <= 3 * l1.se() && std::abs(l2.mean) <= 3 * l2.se();
    return {pass, fmt("M = %zu: ledger1 %.4g (se %.3g, %.2f se), ledger2 %.4g (se %.3g, %.2f se), %.1f s",
                      l1.n, l1.mean, l1.se(), std::abs(l1.mean) / l1.se(), l2.mean, l2.se(),
                      std::abs(l2.mean) / l2.se(), run.seconds)};
}

Outcome c4_sphere() {
    const Problem pb = problem(
        "sim.grid = 8 x 8\n"
        "sim.eps = 0.2\n"
        "sim.T = 0.5\n"
        "noise.seed = 5\n"
        "noise.xi1 = 0\n"
        "noise.xi2 = 1\n"
        "field.h = const:0.3,0.4,1\n"
        "init.d = const:0.6,0,0.8\n");
    const Params& p = pb.params;
    // generator of |d|^2/2 at the initial state: <d, drift> + xi2^2/2 |d x h|^2
    const DirectorField w = laplacian(pb.d0, pb.grid.director_boundary()) - gl_force(pb.d0, p.eps);
    const DirectorField sc = strat_correction(pb.d0, pb.h.h, p.xi2);
    double generator = 0.0;
    for (std::size_t n = 0; n < pb.d0.size(); ++n) {
        const Vec3 dh = cross(pb.d0[n], pb.h.h[n]);
        const Vec3 drift = p.gamma * w[n] + sc[n];
        generator = std::max(generator, std::abs(dot(pb.d0[n], drift) + 0.5 * p.xi2 * p.xi2 * norm_sq(dh)));
    }
    EnsembleSpec spec;
    spec.paths = 256;
    spec.base_seed = pb.config.seed;
    spec.options.checkpoint_every = static_cast<int>(pb.steps);
    const EnsembleStats st = run_ensemble(pb, spec).stats;
    const RunningStats& ex = st.scalars.at("sphere_excess");
    const double h4 = std::pow(pb.h.sup(), 4);
    const double limit = std::max(3 * ex.se(), 2 * p.dt * p.T * h4);
    const bool pass = generator <= 1e-15 && std::abs(ex.mean) <= limit;
    return {pass, fmt("generator drift %.2g (max 1e-15), E(|d(T)|^2 - 1) = %.3g over %zu paths (limit %.3g: 3 se %.3g, "
                      "2 dt T |h|^4 %.3g)",
                      generator, ex.mean, ex.n, limit, 3 * ex.se(), 2 * p.dt * p.T * h4)};
}

Outcome c5_identities() {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    const Grid g = Grid::periodic(100, 100);
    DirectorField d(g), h(g);
    for (std::size_t n = 0; n < d.size(); ++n) {
        Vec3 v{nd(rng), nd(rng), nd(rng)};
        d[n] = (1.0 / std::sqrt(norm_sq(v))) * v;
        h[n] = {ud(rng), ud(rng), ud(rng)};
    }
    const DirectorField noise = apply_noise_d(d, h, 1.0);
    const DirectorField sc = strat_correction(d, h, 1.0);
    double orth = 0.0, triple = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        orth = std::max(orth, std::abs(dot(noise[n], d[n])));
        triple = std::max(triple, std::abs(dot(sc[n], d[n]) + 0.5 * norm_sq(cross(d[n], h[n]))));
    }
    return {orth <= 1e-14 && triple <= 1e-14,
            fmt("%zu pairs: max |<d x h, d>| %.2g, max |<(d x h) x h, d> + |d x h|^2| %.2g (max 1e-14)", d.size(),
                orth, 2 * triple)};
}

Outcome c6_maximum_principle() {
    const DeterministicRun& run = deterministic_run();
    const double limit = 1.0 + 10.0 * run.pb.params.dt / (run.pb.params.eps * run.pb.params.eps);
    double worst = 0.0;
    for (const Monitors& m : run.result.checkpoint_monitors) worst = std::max(worst, m.max_director);
    return {worst <= limit && run.pb.d0.max_abs() <= 1.0 + 1e-15,
            fmt("|d0| <= %.17g, max |d| at checkpoints %.12g (limit %.12g)", run.pb.d0.max_abs(), worst, limit)};
}

Outcome c7_pohozaev() {
    bool pass = true;
    std::string detail;
    for (Multiplier m : {Multiplier::radial, Multiplier::first_axis, Multiplier::shear}) {
        std::vector<double> res;
        for (int n : {32, 64, 128}) {
            const Grid g = Grid::periodic(n, n);
            const DirectorField d = DirectorField::from_function(g, [](double x, double y) {
                return Vec3{std::cos(2 * pi * x) * (1.0 + 0.2 * std::sin(2 * pi * y)), std::sin(2 * pi * (x + y)),
                            0.3 * std::cos(4 * pi * y)};
            });
            res.push_back(std::abs(pohozaev_residual(d, 0.2, 0.45, 0.55, 0.3, m).residual));
        }
        const double order = observed_order(res);
        const bool ok = res[1] < res[0] && res[2] < res[1] && order >= 1.0;
        pass = pass && ok;
        detail += fmt("%s%s %.2e %.2e %.2e order %.2f", detail.empty() ? "" : "; ", to_string(m).c_str(), res[0],
                      res[1], res[2], order);
    }
    return {pass, detail + " (min order 1)"};
}

Outcome c8_penalty_scaling() {
    const SweepRun& run = sweep_run();
    const auto& eps = run.pb.config.sweep_eps;
    const auto& sp = run.result.sup_penalty;
    const auto& dev = run.result.final_sphere_deviation;
    bool bounded = true, shrinking = true;
    std::string detail = fmt("M = %zu, %.1f s;", run.result.paths.size(), run.seconds);
    for (std::size_t k = 0; k < eps.size(); ++k) {
        bounded = bounded && sp[k].mean <= 1.2 * sp[0].mean;
        detail += fmt(" eps %.3g: sup F %.4g, |d|^2-1 %.4g;", eps[k], sp[k].mean, dev[k].mean);
        if (k > 0) shrinking = shrinking && dev[k - 1].mean >= 1.5 * dev[k].mean;
    }
    for (std::size_t k = 1; k < eps.size(); ++k) detail += fmt(" ratio %.2f", dev[k - 1].mean / dev[k].mean);
    return {bounded && shrinking, detail + " (sup F within 1.2 x eps_max value, ratio min 1.5)"};
}

Outcome c9_stress_cauchy() {
    const SweepRun& run = sweep_run();
    const auto& c = run.result.cauchy;
    // a test whose integrals sit at roundoff carries no information
    std::vector<double> size(run.tests.size(), 0.0);
    for (const auto& t : run.result.paths)
        for (const auto& lv : t.levels)
            for (std::size_t j = 0; j < size.size(); ++j)
                size[j] = std::max(size[j], std::abs(lv.pairing_integrals[j]));
    const double scale = *std::ranges::max_element(size);
    int decreasing = 0;
    std::string detail;
    for (std::size_t j = 0; j < run.tests.size(); ++j) {
        const bool degenerate = size[j] <= 1e-12 * scale;
        const bool dec = !degenerate && c[1][j].mean < c[0][j].mean;
        decreasing += dec;
        detail += fmt("%s %.3g -> %.3g%s", run.tests[j].name.c_str(), c[0][j].mean, c[1][j].mean,
                      degenerate ? " (degenerate)" : "");
        detail += j + 1 < run.tests.size() ? "; " : "";
    }
    bool concentration = false;
    for (const auto& t : run.result.paths) concentration = concentration || t.concentration;
    detail += fmt(" (%d of %zu decreasing, need 2)", decreasing, run.tests.size());
    if (concentration) detail += "; caveat: defect_detect fired, concentration may affect the pairings";
    return {decreasing >= 2, detail};
}

Outcome c10_defects() {
    const Grid g = Grid::bounded(129, 129, DirectorBc::neumann, 2.0, 2.0);
    const double eps = 0.05, h = g.hx(), xc = 0.6 + 0.3 * h, yc = 0.9;
    const double r = default_defect_radius(g), t = default_defect_threshold(g, eps);
    const DefectReport vortex = defect_detect(vortex_director(g, xc, yc, 2 * h), eps, r, t);
    const DefectReport uniform = defect_detect(DirectorField(g, Vec3{0, 1, 0}), eps, r, t);
    const double dist = vortex.count() ? std::hypot(vortex.centers[0].x - xc, vortex.centers[0].y - yc) : INFINITY;
    return {vortex.count() == 1 && dist <= 2 * h && uniform.count() == 0,
            fmt("vortex: %zu centre(s), distance %.3g h (max 2 h); uniform: %zu centre(s)", vortex.count(), dist / h,
                uniform.count())};
}

Outcome c11_projection_transport() {
    const DeterministicRun& run = deterministic_run();
    const Monitors& m = run.result.monitors;
    return {m.max_divergence <= 1e-10 && m.max_transport <= 1e-12,
            fmt("max |div u| %.2g (max 1e-10), max |<adv(u,u),u>|/(1+|u|^3) %.2g (max 1e-12) over %zu steps",
                m.max_divergence, m.max_transport, run.pb.steps)};
}

bool same_paths(const EnsembleResult& a, const EnsembleResult& b) {
    if (a.paths.size() != b.paths.size()) return false;
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        const auto& pa = a.paths[i].checkpoints;
        const auto& pb = b.paths[i].checkpoints;
        if (pa.size() != pb.size()) return false;
        for (std::size_t c = 0; c < pa.size(); ++c)
            if (pa[c].columns() != pb[c].columns()) return false;
        const SimState& sa = *a.paths[i].final_state;
        const SimState& sb = *b.paths[i].final_state;
        if (!std::ranges::equal(sa.u.values(), sb.u.values()) || !std::ranges::equal(sa.d.values(), sb.d.values()))
            return false;
    }
    return true;
}

Outcome c12_reproducibility() {
    const MartingaleRun& run = martingale_run();
    const EnsembleResult again = run_ensemble(run.pb, martingale_spec(run.pb));
    EnsembleSpec shuffled = martingale_spec(run.pb);
    shuffled.order.resize(static_cast<std::size_t>(shuffled.paths));
    std::iota(shuffled.order.begin(), shuffled.order.end(), std::size_t{0});
    std::shuffle(shuffled.order.begin(), shuffled.order.end(), std::mt19937(3));
    shuffled.threads = 2;
    const EnsembleResult mixed = run_ensemble(run.pb, shuffled);
    const bool rerun = again.stats == run.result.stats && same_paths(again, run.result);
    const bool order = mixed.stats == run.result.stats && same_paths(mixed, run.result);
    return {rerun && order, fmt("rerun %s, shuffled order on 2 threads %s", rerun ? "bit-identical" : "differs",
                                order ? "bit-identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"deterministic dissipation", c1_dissipation},
        {"energy budget identity", c2_budget},
        {"martingale zero mean", c3_martingale},
        {"sphere conservation in law", c4_sphere},
        {"triple-product and orthogonality identities", c5_identities},
        {"maximum principle", c6_maximum_principle},
        {"pohozaev residual convergence", c7_pohozaev},
        {"penalty and eps scaling", c8_penalty_scaling},
        {"stress pairing cauchy convergence", c9_stress_cauchy},
        {"defect detection", c10_defects},
        {"projection and transport", c11_projection_transport},
        {"reproducibility", c12_reproducibility},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("C%-2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
