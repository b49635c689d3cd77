#include "selflow/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "selflow/operators.hpp"
#include "selflow/pohozaev.hpp"
#include "selflow/rng.hpp"

namespace selflow {
namespace {

// Runs fn(index) for every index in `order` on up to `threads` workers and
// rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, int threads, const std::vector<std::size_t>& order, F&& fn) {
    std::vector<std::size_t> idx = order;
    if (idx.empty()) {
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    if (idx.size() != n) throw ArgumentError("execution order must list every path once");
    {
        std::vector<std::size_t> sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i)
            if (sorted[i] != i) throw ArgumentError("execution order must list every path once");
    }
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n) return;
            {
                std::lock_guard lock(m);
                if (failure) return;
            }
            try {
                fn(idx[k]);
            } catch (...) {
                std::lock_guard lock(m);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

RunningStats tree_reduce(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        RunningStats s;
        s.add(x[lo]);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return RunningStats::merge(tree_reduce(x, lo, mid), tree_reduce(x, mid, hi));
}

RunningStats reduce(const std::vector<double>& x) {
    return x.empty() ? RunningStats{} : tree_reduce(x, 0, x.size());
}

double sphere_deviation(const DirectorField& d) {
    const ScalarField dev = pointwise<3, 1>(d, [](const Vec3& v) {
        const double a = norm_sq(v) - 1.0;
        return Vec<1>{a * a};
    });
    return std::sqrt(integrate(dev));
}

}  // namespace

std::uint64_t path_seed(std::uint64_t base, std::size_t index) {
    return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

PathResult run_path(const Problem& pb, std::uint64_t seed, const PathOptions& opt) {
    if (opt.checkpoint_every < 1) throw ArgumentError("checkpoint_every must be at least 1");
    Stepper st(pb.grid, pb.params, NoiseOperator(pb.grid, pb.noise), pb.h);
    st.check_stability(pb.u0);
    SimState s(pb.u0, pb.d0);
    WienerDriver w(seed, pb.noise.modes);
    const Params& p = st.params();

    PathResult r;
    r.seed = seed;
    std::vector<FieldGradient<2>> grad_phi;
    for (const auto& t : opt.pairing_tests) {
        if (projection_divergence(t.phi).max_abs() > p.proj_tol)
            throw ArgumentError("test function '" + t.name + "' is not divergence-free");
        grad_phi.push_back(gradient(t.phi, pb.grid.velocity_boundary()));
    }
    r.pairing_integrals.assign(grad_phi.size(), 0.0);

    std::optional<BudgetAccumulator> budget;
    if (opt.budget) budget.emplace(p);
    double sup = -std::numeric_limits<double>::infinity();
    Monitors interval;

    auto checkpoint = [&](const EnergyRecord& rec, const Field<3>* stress) {
        r.checkpoints.push_back(rec);
        if (budget) r.budget_at_checkpoints.push_back(s.step == 0 ? 0.0 : budget->residual());
        interval.max_director = s.d.max_abs();
        r.checkpoint_monitors.push_back(interval);
        interval = Monitors{};
        sup = std::max(sup, rec.total);
        r.running_sup.push_back(sup);
        r.monitors.max_director = std::max(r.monitors.max_director, s.d.max_abs());
        if (!grad_phi.empty()) {
            const Field<3> t = stress ? *stress : traceless_stress(s.d);
            std::vector<double> row;
            for (const auto& g : grad_phi) row.push_back(stress_pairing(t, g));
            r.pairings.push_back(std::move(row));
        }
    };

    {
        const EnergyRecord rec = energy_record(s, st);
        if (budget) budget->add(rec);
        checkpoint(rec, nullptr);
    }
    for (std::size_t n = 0; n < pb.steps; ++n) {
        std::optional<Field<3>> stress;
        if (!grad_phi.empty()) {
            stress = traceless_stress(s.d);
            for (std::size_t k = 0; k < grad_phi.size(); ++k)
                r.pairing_integrals[k] += p.dt * stress_pairing(*stress, grad_phi[k]);
        }
        const double unorm = norm_l2(s.u);
        const StepInfo info = st.step(s, w);
        r.dissipated += p.dt * (p.mu * info.dissipation_u + p.lambda * p.gamma * info.dissipation_d);
        const double transport = std::abs(info.transport_u) / (1.0 + unorm * unorm * unorm);
        r.monitors.max_divergence = std::max(r.monitors.max_divergence, info.divergence);
        r.monitors.max_transport = std::max(r.monitors.max_transport, transport);
        interval.max_divergence = std::max(interval.max_divergence, info.divergence);
        interval.max_transport = std::max(interval.max_transport, transport);
        if (opt.sup_every_step) sup = std::max(sup, total_energy(s, p));

        const bool at_checkpoint = (n + 1) % static_cast<std::size_t>(opt.checkpoint_every) == 0 ||
                                   n + 1 == pb.steps;
        std::optional<EnergyRecord> rec;
        if (budget) {
            rec = energy_record(s, st);
            budget->add(*rec);
        }
        if (at_checkpoint) {
            if (!rec) rec = energy_record(s, st);
            checkpoint(*rec, nullptr);
        }
        if (opt.on_step) opt.on_step(s, info);
    }
    r.sup_total = sup;
    if (budget && !budget->empty() && pb.steps > 0) r.budget_residual = budget->residual();
    r.final_state.emplace(std::move(s));
    return r;
}

void RunningStats::add(double x) {
    RunningStats one;
    one.n = 1;
    one.mean = x;
    one.min = one.max = x;
    *this = merge(*this, one);
}

RunningStats RunningStats::merge(const RunningStats& a, const RunningStats& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    RunningStats out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * nb / (na + nb);
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / (na + nb);
    out.min = std::min(a.min, b.min);
    out.max = std::max(a.max, b.max);
    return out;
}

double RunningStats::variance() const { return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1); }

double RunningStats::se() const {
    return n < 2 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(variance() / static_cast<double>(n));
}

std::map<std::string, double> path_scalars(const PathResult& r, const Params& p) {
    std::map<std::string, double> out;
    const EnergyRecord& last = r.checkpoints.back();
    out["sup_total"] = r.sup_total;
    out["dissipated"] = r.dissipated;
    out["ledger1"] = last.ledger1;
    out["ledger2"] = last.ledger2;
    out["martingale1"] = p.xi1 * last.ledger1;
    out["martingale2"] = p.lambda * p.xi2 * last.ledger2;
    out["final_total"] = last.total;
    if (r.final_state) {
        const Grid& g = r.final_state->d.grid();
        const ScalarField ex = pointwise<3, 1>(r.final_state->d, [](const Vec3& v) {
            return Vec<1>{norm_sq(v) - 1.0};
        });
        out["sphere_excess"] = integrate(ex) / (g.lx() * g.ly());
    }
    if (r.budget_residual) out["budget_residual"] = *r.budget_residual;
    return out;
}

EnsembleStats reduce_paths(const std::vector<PathResult>& results, const Params& p) {
    EnsembleStats st;
    st.paths = results.size();
    if (results.empty()) return st;
    const std::size_t nc = results.front().checkpoints.size();
    for (const auto& r : results)
        if (r.checkpoints.size() != nc) throw ArgumentError("paths have different checkpoint counts");
    const std::size_t ncol = EnergyRecord::column_names().size();
    for (std::size_t c = 0; c < nc; ++c) {
        st.times.push_back(results.front().checkpoints[c].t);
        std::vector<RunningStats> row;
        std::vector<std::vector<double>> cols(ncol);
        for (const auto& r : results) {
            const auto v = r.checkpoints[c].columns();
            for (std::size_t k = 0; k < ncol; ++k) cols[k].push_back(v[k]);
        }
        for (const auto& col : cols) row.push_back(reduce(col));
        st.records.push_back(std::move(row));
    }
    std::map<std::string, std::vector<double>> scalars;
    for (const auto& r : results)
        for (const auto& [k, v] : path_scalars(r, p)) scalars[k].push_back(v);
    for (const auto& [k, v] : scalars)
        if (v.size() == results.size()) st.scalars[k] = reduce(v);
    return st;
}

EnsembleResult run_ensemble(const Problem& problem, const EnsembleSpec& spec) {
    if (spec.paths < 1) throw ArgumentError("ensemble needs at least one path");
    const std::size_t m = static_cast<std::size_t>(spec.paths);
    std::vector<std::optional<PathResult>> slots(m);
    parallel_for(m, spec.threads, spec.order, [&](std::size_t i) {
        slots[i] = run_path(problem, path_seed(spec.base_seed, i), spec.options);
    });
    EnsembleResult out;
    for (auto& s : slots) out.paths.push_back(std::move(*s));
    out.stats = reduce_paths(out.paths, problem.params);
    return out;
}

std::pair<MeanTest, MeanTest> martingale_test(const EnsembleStats& stats) {
    const RunningStats& a = stats.scalars.at("martingale1");
    const RunningStats& b = stats.scalars.at("martingale2");
    return {{a.mean, a.se()}, {b.mean, b.se()}};
}

std::pair<double, double> gronwall_constants(const Problem& pb) {
    const Params& p = pb.params;
    const double cs = NoiseOperator(pb.grid, pb.noise).linear_growth_constant();
    const double hs = pb.h.sup(), hg = pb.h.sup_gradient();
    const double ch = 4.0 * (hs * hg + hg * hg);
    const double area = pb.grid.lx() * pb.grid.ly();
    const double C = p.xi1 * p.xi1 * cs + p.xi2 * p.xi2 * ch * 2.0 * std::max(1.0, p.eps * p.eps);
    const double A = 0.5 * p.xi1 * p.xi1 * cs + 1.5 * p.lambda * p.xi2 * p.xi2 * ch * area;
    const double a = C > 0.0 ? std::max(1.0, A / C) : 1.0;
    return {C, a};
}

GronwallReport gronwall_bound_check(const Problem& problem, const EnsembleSpec& spec, double T0) {
    if (spec.paths < 4) throw ArgumentError("the two-horizon check needs at least 4 paths");
    Problem pb = problem;
    const std::size_t steps0 = static_cast<std::size_t>(std::llround(T0 / pb.params.dt));
    if (steps0 == 0 || std::abs(steps0 * pb.params.dt - T0) > 1e-9 * T0)
        throw ArgumentError("T0 must be a whole number of time steps");
    pb.steps = 2 * steps0;
    pb.params.T = 2.0 * T0;
    EnsembleSpec sp = spec;
    sp.options.checkpoint_every =
        static_cast<int>(std::gcd(static_cast<std::size_t>(sp.options.checkpoint_every), steps0));
    const std::size_t k0 = steps0 / static_cast<std::size_t>(sp.options.checkpoint_every);

    const EnsembleResult ens = run_ensemble(pb, sp);
    GronwallReport rep;
    rep.T0 = T0;
    rep.initial_energy = ens.paths.front().checkpoints.front().total;
    std::vector<double> s1, s2, d2, sq;
    for (const auto& r : ens.paths) {
        s1.push_back(r.running_sup.at(k0));
        s2.push_back(r.sup_total);
        d2.push_back(r.dissipated);
        sq.push_back(r.sup_total * r.sup_total);
    }
    rep.sup_T0 = reduce(s1);
    rep.sup_2T0 = reduce(s2);
    rep.dissipated_2T0 = reduce(d2);
    const auto [C, a] = gronwall_constants(pb);
    rep.growth_constant = C;
    rep.offset = a;
    rep.log_increase = std::log(a + rep.sup_2T0.mean) - std::log(a + rep.sup_T0.mean);
    const double r1 = rep.sup_T0.se() / (a + rep.sup_T0.mean);
    const double r2 = rep.sup_2T0.se() / (a + rep.sup_2T0.mean);
    rep.slack = 3.0 * std::sqrt(r1 * r1 + r2 * r2);
    rep.growth_ok = std::isfinite(rep.sup_2T0.mean) && rep.log_increase <= C * T0 + rep.slack;

    const Params& p = pb.params;
    rep.zero_noise = (p.xi1 == 0.0 || pb.noise.modes == 0 || pb.noise.sigma0 == 0.0) &&
                     (p.xi2 == 0.0 || pb.h.sup() == 0.0);
    if (rep.zero_noise)
        for (double v : s2) rep.no_growth_ok = rep.no_growth_ok && v <= rep.initial_energy * (1.0 + 1e-12);

    const std::size_t half = sq.size() / 2;
    const RunningStats full = reduce(sq);
    const RunningStats first(reduce(std::vector<double>(sq.begin(), sq.begin() + half)));
    rep.moment2_full = full.mean;
    rep.moment2_half = first.mean;
    // the half-sample mean minus the full mean has variance sigma^2 (1/half - 1/M)
    rep.moment2_se = std::sqrt(full.variance() * (1.0 / half - 1.0 / sq.size()));
    rep.moment_ok = std::isfinite(full.mean) &&
                    std::abs(rep.moment2_half - rep.moment2_full) <= 3.0 * rep.moment2_se + 1e-300;
    return rep;
}

SweepTable epsilon_sweep(const Problem& problem, const std::vector<double>& eps_list,
                         std::uint64_t seed, const std::vector<VelocityTest>& tests,
                         int checkpoint_every) {
    if (eps_list.empty()) throw ArgumentError("eps list must not be empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw ArgumentError("eps list must be strictly decreasing");
    SweepTable table;
    table.seed = seed;
    for (const auto& t : tests) table.tests.push_back(t.name);
    const RunConfig& cfg = problem.config;
    const double radius = cfg.defect_radius ? *cfg.defect_radius : default_defect_radius(problem.grid);

    for (double eps : eps_list) {
        const Problem pb = with_eps(problem, eps);
        const double threshold = cfg.delta0_sq ? *cfg.delta0_sq : default_defect_threshold(pb.grid, eps);
        SweepLevel lv;
        lv.eps = eps;
        auto observe = [&](const DirectorField& d) {
            lv.sphere_deviation.push_back(sphere_deviation(d));
            lv.defects.push_back(defect_detect(d, eps, radius, threshold).count());
        };
        observe(pb.d0);
        PathOptions opt;
        opt.checkpoint_every = checkpoint_every;
        opt.pairing_tests = tests;
        // the penalty peaks on the relaxation time eps^2 / (2 gamma), which can
        // fall between checkpoints, so its supremum is taken over every step
        opt.on_step = [&](const SimState& s, const StepInfo&) {
            lv.sup_penalty = std::max(lv.sup_penalty, integrate(penalty_density(s.d, eps)));
            if (s.step % static_cast<std::size_t>(checkpoint_every) == 0 || s.step == pb.steps) observe(s.d);
        };
        const PathResult r = run_path(pb, seed, opt);
        for (const auto& rec : r.checkpoints) {
            lv.times.push_back(rec.t);
            lv.penalty.push_back(rec.penalty);
            lv.sup_penalty = std::max(lv.sup_penalty, rec.penalty);
        }
        lv.pairings = r.pairings;
        lv.pairing_integrals = r.pairing_integrals;
        table.concentration = table.concentration ||
                              std::any_of(lv.defects.begin(), lv.defects.end(), [](std::size_t c) { return c > 0; });
        table.levels.push_back(std::move(lv));
    }
    for (std::size_t k = 0; k + 1 < table.levels.size(); ++k) {
        std::vector<double> integ, fin;
        for (std::size_t j = 0; j < tests.size(); ++j) {
            integ.push_back(std::abs(table.levels[k].pairing_integrals[j] -
                                     table.levels[k + 1].pairing_integrals[j]));
            fin.push_back(std::abs(table.levels[k].pairings.back()[j] -
                                   table.levels[k + 1].pairings.back()[j]));
        }
        table.cauchy.push_back(std::move(integ));
        table.cauchy_final.push_back(std::move(fin));
    }
    return table;
}

CoupledSweep coupled_sweep(const Problem& problem, const EnsembleSpec& spec,
                           const std::vector<double>& eps_list,
                           const std::vector<VelocityTest>& tests) {
    if (spec.paths < 1) throw ArgumentError("sweep needs at least one path");
    const std::size_t m = static_cast<std::size_t>(spec.paths);
    std::vector<std::optional<SweepTable>> slots(m);
    parallel_for(m, spec.threads, spec.order, [&](std::size_t i) {
        slots[i] = epsilon_sweep(problem, eps_list, path_seed(spec.base_seed, i), tests,
                                 spec.options.checkpoint_every);
    });
    CoupledSweep out;
    for (auto& s : slots) out.paths.push_back(std::move(*s));
    const std::size_t gaps = eps_list.size() - 1;
    out.cauchy.assign(gaps, std::vector<RunningStats>(tests.size()));
    for (std::size_t k = 0; k < gaps; ++k)
        for (std::size_t j = 0; j < tests.size(); ++j) {
            std::vector<double> v;
            for (const auto& t : out.paths) v.push_back(t.cauchy[k][j]);
            out.cauchy[k][j] = reduce(v);
        }
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        std::vector<double> sp, sd;
        for (const auto& t : out.paths) {
            sp.push_back(t.levels[e].sup_penalty);
            sd.push_back(t.levels[e].sphere_deviation.back());
        }
        out.sup_penalty.push_back(reduce(sp));
        out.final_sphere_deviation.push_back(reduce(sd));
    }
    return out;
}

}  // namespace selflow
