#include "selflow/workflows.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "selflow/field_io.hpp"
#include "selflow/pohozaev.hpp"

namespace selflow {
namespace fs = std::filesystem;
namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

void close_checked(std::ofstream& os, const fs::path& path) {
    os.close();
    if (!os) throw IoError("failed writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os = open_out(path);
    os << text;
    close_checked(os, path);
}

fs::path make_run_dir(const RunConfig& cfg, const fs::path& out_root) {
    const fs::path dir = run_directory(cfg, out_root);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "config.cfg", cfg.canonical());
    return dir;
}

std::string manifest(const RunConfig& cfg, const Problem& pb, const std::vector<std::uint64_t>& seeds) {
    std::ostringstream os;
    os << "format_version = " << output_format_version << "\n"
       << "mode = " << cfg.mode << "\n"
       << "config_hash = " << cfg.hash() << "\n"
       << "grid = " << pb.grid.nx() << " x " << pb.grid.ny() << "\n"
       << "domain = " << num(pb.grid.lx()) << " x " << num(pb.grid.ly()) << "\n"
       << "bc = " << cfg.bc << "\n"
       << "dt = " << num(pb.params.dt) << "\n"
       << "steps = " << pb.steps << "\n"
       << "checkpoint_every = " << cfg.checkpoint_every << "\n"
       << "sup_granularity = "
       << (cfg.sup_every_step ? "steps" : "checkpoints (under-estimates the path supremum)") << "\n"
       << "seeds =";
    for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? ", " : " ") << seeds[i];
    os << "\n";
    return os.str();
}

void write_records(const fs::path& path, const PathResult& r) {
    std::ofstream os = open_out(path);
    const bool budget = !r.budget_at_checkpoints.empty();
    const auto& names = EnergyRecord::column_names();
    for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
    if (budget) os << ",budget_residual";
    os << "\n";
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        const auto v = r.checkpoints[c].columns();
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << num(v[k]);
        if (budget) os << "," << num(r.budget_at_checkpoints[c]);
        os << "\n";
    }
    close_checked(os, path);
}

void write_monitors(const fs::path& path, const PathResult& r) {
    std::ofstream os = open_out(path);
    os << "t,max_abs_d,max_divergence,max_transport\n";
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        const Monitors& m = r.checkpoint_monitors[c];
        os << num(r.checkpoints[c].t) << "," << num(m.max_director) << "," << num(m.max_divergence)
           << "," << num(m.max_transport) << "\n";
    }
    close_checked(os, path);
}

std::string stats_columns() { return "n,mean,variance,se,min,max"; }

std::string stats_row(const RunningStats& s) {
    return std::to_string(s.n) + "," + num(s.mean) + "," + num(s.variance()) + "," + num(s.se()) +
           "," + num(s.min) + "," + num(s.max);
}

EnsembleSpec ensemble_spec(const RunConfig& cfg, int threads) {
    EnsembleSpec spec;
    spec.paths = cfg.paths;
    spec.base_seed = cfg.seed;
    spec.threads = threads;
    spec.options.checkpoint_every = cfg.checkpoint_every;
    spec.options.sup_every_step = cfg.sup_every_step;
    spec.options.budget = cfg.budget;
    return spec;
}

std::vector<std::uint64_t> path_seeds(const RunConfig& cfg) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < cfg.paths; ++i) out.push_back(path_seed(cfg.seed, static_cast<std::size_t>(i)));
    return out;
}

std::string step_tag(std::size_t step) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08zu", step);
    return buf;
}

}  // namespace

fs::path run_directory(const RunConfig& cfg, const fs::path& out_root) {
    return out_root / (cfg.mode + "-" + cfg.hash());
}

RunOutput simulate_workflow(RunConfig cfg, const fs::path& out_root) {
    cfg.mode = "simulate";
    const Problem pb = build_problem(cfg);
    const fs::path dir = make_run_dir(cfg, out_root);
    write_text(dir / "manifest.txt", manifest(cfg, pb, {cfg.seed}));
    const fs::path snaps = dir / "snapshots";
    std::error_code ec;
    fs::create_directories(snaps, ec);
    if (ec) throw IoError("cannot create " + snaps.string());

    auto save = [&](const SimState& s) {
        write_snapshot(snaps / ("u_" + step_tag(s.step) + ".snap"), s.u);
        write_snapshot(snaps / ("d_" + step_tag(s.step) + ".snap"), s.d);
    };
    save(SimState(pb.u0, pb.d0));
    PathOptions opt;
    opt.checkpoint_every = cfg.checkpoint_every;
    opt.sup_every_step = cfg.sup_every_step;
    opt.budget = cfg.budget;
    opt.on_step = [&](const SimState& s, const StepInfo&) {
        if (s.step % static_cast<std::size_t>(cfg.checkpoint_every) == 0 || s.step == pb.steps) save(s);
    };
    const PathResult r = run_path(pb, cfg.seed, opt);
    write_records(dir / "energy.csv", r);
    write_monitors(dir / "monitors.csv", r);

    std::ostringstream os;
    os << "steps " << pb.steps << ", dt " << num(pb.params.dt) << "\n"
       << "energy " << num(r.checkpoints.front().total) << " -> " << num(r.checkpoints.back().total)
       << ", sup " << num(r.sup_total) << ", dissipated " << num(r.dissipated) << "\n"
       << "max |div u| " << num(r.monitors.max_divergence) << ", max |d| " << num(r.monitors.max_director)
       << "\n";
    if (r.budget_residual) os << "budget residual " << num(*r.budget_residual) << "\n";
    write_text(dir / "report.txt", os.str());
    return {dir, os.str()};
}

RunOutput ensemble_workflow(RunConfig cfg, const fs::path& out_root, int threads) {
    cfg.mode = "ensemble";
    const Problem pb = build_problem(cfg);
    const fs::path dir = make_run_dir(cfg, out_root);
    write_text(dir / "manifest.txt", manifest(cfg, pb, path_seeds(cfg)));

    const EnsembleResult e = run_ensemble(pb, ensemble_spec(cfg, threads));
    const fs::path paths = dir / "paths";
    std::error_code ec;
    fs::create_directories(paths, ec);
    if (ec) throw IoError("cannot create " + paths.string());
    for (std::size_t i = 0; i < e.paths.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%04zu.csv", i);
        write_records(paths / name, e.paths[i]);
    }
    {
        const fs::path path = dir / "summary.csv";
        std::ofstream os = open_out(path);
        os << "t,quantity," << stats_columns() << "\n";
        const auto& names = EnergyRecord::column_names();
        for (std::size_t c = 0; c < e.stats.times.size(); ++c)
            for (std::size_t k = 0; k < names.size(); ++k)
                if (names[k] != "t")
                    os << num(e.stats.times[c]) << "," << names[k] << "," << stats_row(e.stats.records[c][k])
                       << "\n";
        close_checked(os, path);
    }
    {
        const fs::path path = dir / "scalars.csv";
        std::ofstream os = open_out(path);
        os << "quantity," << stats_columns() << "\n";
        for (const auto& [k, s] : e.stats.scalars) os << k << "," << stats_row(s) << "\n";
        close_checked(os, path);
    }
    std::ostringstream os;
    os << "paths " << e.stats.paths << ", steps " << pb.steps << ", dt " << num(pb.params.dt) << "\n";
    const RunningStats& sup = e.stats.scalars.at("sup_total");
    os << "E sup energy " << num(sup.mean) << " +- " << num(sup.se()) << "\n";
    if (e.stats.paths >= 2) {
        const auto [m1, m2] = martingale_test(e.stats);
        os << "martingale1 mean " << num(m1.mean) << " (se " << num(m1.se) << ", "
           << (m1.within(3.0) ? "within" : "outside") << " 3 se)\n"
           << "martingale2 mean " << num(m2.mean) << " (se " << num(m2.se) << ", "
           << (m2.within(3.0) ? "within" : "outside") << " 3 se)\n";
    }
    write_text(dir / "report.txt", os.str());
    return {dir, os.str()};
}

RunOutput sweep_workflow(RunConfig cfg, const fs::path& out_root, int threads) {
    cfg.mode = "sweep";
    const Problem pb = build_problem(cfg);
    const auto tests = default_velocity_tests(pb.grid);
    // fail on an unstable eps before anything is written
    for (double eps : cfg.sweep_eps) with_eps(pb, eps);
    const fs::path dir = make_run_dir(cfg, out_root);
    write_text(dir / "manifest.txt", manifest(cfg, pb, path_seeds(cfg)));

    const CoupledSweep sw = coupled_sweep(pb, ensemble_spec(cfg, threads), cfg.sweep_eps, tests);
    bool concentration = false;
    {
        const fs::path path = dir / "sweep_levels.csv";
        std::ofstream os = open_out(path);
        os << "path,eps,t,penalty,sphere_deviation,defects";
        for (const auto& t : tests) os << ",pairing_" << t.name;
        os << "\n";
        for (std::size_t p = 0; p < sw.paths.size(); ++p) {
            concentration = concentration || sw.paths[p].concentration;
            for (const SweepLevel& lv : sw.paths[p].levels)
                for (std::size_t c = 0; c < lv.times.size(); ++c) {
                    os << p << "," << num(lv.eps) << "," << num(lv.times[c]) << "," << num(lv.penalty[c])
                       << "," << num(lv.sphere_deviation[c]) << "," << lv.defects[c];
                    for (double v : lv.pairings[c]) os << "," << num(v);
                    os << "\n";
                }
        }
        close_checked(os, path);
    }
    {
        const fs::path path = dir / "cauchy.csv";
        std::ofstream os = open_out(path);
        os << "eps_a,eps_b,test," << stats_columns() << "\n";
        for (std::size_t k = 0; k < sw.cauchy.size(); ++k)
            for (std::size_t j = 0; j < tests.size(); ++j)
                os << num(cfg.sweep_eps[k]) << "," << num(cfg.sweep_eps[k + 1]) << "," << tests[j].name
                   << "," << stats_row(sw.cauchy[k][j]) << "\n";
        close_checked(os, path);
    }
    {
        const fs::path path = dir / "sweep_summary.csv";
        std::ofstream os = open_out(path);
        os << "eps,quantity," << stats_columns() << "\n";
        for (std::size_t e = 0; e < cfg.sweep_eps.size(); ++e) {
            os << num(cfg.sweep_eps[e]) << ",sup_penalty," << stats_row(sw.sup_penalty[e]) << "\n";
            os << num(cfg.sweep_eps[e]) << ",final_sphere_deviation,"
               << stats_row(sw.final_sphere_deviation[e]) << "\n";
        }
        close_checked(os, path);
    }
    std::ostringstream os;
    os << "paths " << sw.paths.size() << ", eps";
    for (double e : cfg.sweep_eps) os << " " << num(e);
    os << ", dt " << num(pb.params.dt) << "\n";
    for (std::size_t k = 0; k < sw.cauchy.size(); ++k) {
        os << "gap " << num(cfg.sweep_eps[k]) << " -> " << num(cfg.sweep_eps[k + 1]) << ":";
        for (std::size_t j = 0; j < tests.size(); ++j) os << " " << tests[j].name << " " << num(sw.cauchy[k][j].mean);
        os << "\n";
    }
    if (concentration)
        os << "note: defect_detect fired; pairing differences may reflect energy concentration\n";
    write_text(dir / "report.txt", os.str());
    return {dir, os.str()};
}

std::string diagnose_snapshot(const fs::path& snapshot, const DiagnoseOptions& o) {
    AnyField any = read_snapshot(snapshot, o.lx, o.ly);
    if (!std::holds_alternative<DirectorField>(any))
        throw ArgumentError("diagnose needs a director snapshot (3 components)");
    const DirectorField& d = std::get<DirectorField>(any);
    const Grid& g = d.grid();
    const bool all = !o.pohozaev && !o.defects && !o.pairings;
    std::ostringstream os;
    if (all || o.pohozaev) {
        const double x0 = o.x0.value_or(0.5 * g.lx()), y0 = o.y0.value_or(0.5 * g.ly());
        const double r = o.r.value_or(0.25 * std::min(g.lx(), g.ly()));
        os << "# pohozaev\nmultiplier,x0,y0,r,boundary_flux,stress_bulk,energy_bulk,energy_flux,rhs,residual\n";
        for (Multiplier m : {Multiplier::radial, Multiplier::first_axis, Multiplier::shear}) {
            const PohozaevReport p = pohozaev_residual(d, o.eps, x0, y0, r, m);
            os << to_string(m) << "," << num(p.x0) << "," << num(p.y0) << "," << num(p.r) << ","
               << num(p.boundary_flux) << "," << num(p.stress_bulk) << "," << num(p.energy_bulk) << ","
               << num(p.energy_flux) << "," << num(p.rhs) << "," << num(p.residual) << "\n";
        }
    }
    if (all || o.defects) {
        const double r = o.defect_radius.value_or(default_defect_radius(g));
        const double t = o.delta0_sq.value_or(default_defect_threshold(g, o.eps));
        const DefectReport rep = defect_detect(d, o.eps, r, t);
        os << "# defects r=" << num(rep.r) << " threshold=" << num(rep.threshold)
           << " (fixed-eps proxy for the concentration set)\nx,y,energy\n";
        for (const auto& c : rep.centers) os << num(c.x) << "," << num(c.y) << "," << num(c.energy) << "\n";
    }
    if (all || o.pairings) {
        os << "# pairings\ntest,diagonal,off_diagonal,total\n";
        for (const auto& t : default_velocity_tests(g)) {
            const PairingParts p = stress_pairing_parts(d, t.phi);
            os << t.name << "," << num(p.diagonal) << "," << num(p.off_diagonal) << ","
               << num(p.diagonal + p.off_diagonal) << "\n";
        }
    }
    return os.str();
}

}  // namespace selflow
