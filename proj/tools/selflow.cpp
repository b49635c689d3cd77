#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "selflow/workflows.hpp"

using namespace selflow;

namespace {

enum Exit { ok = 0, validation = 1, numerical = 2, io = 3 };

std::filesystem::path out_root(const RunConfig& cfg) {
    if (const char* env = std::getenv("SELFLOW_OUT"); env && *env) return env;
    return cfg.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic relaxed Ericksen-Leslie simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 1;
    app.add_option("--threads", threads, "Maximum parallel paths (0: all cores)")->check(CLI::NonNegativeNumber);

    std::string cfg_path;
    auto* sim = app.add_subcommand("simulate", "Run one path");
    auto* ens = app.add_subcommand("ensemble", "Run ensemble.paths independent paths");
    auto* swp = app.add_subcommand("sweep", "Coupled eps sweep over sweep.eps");
    for (auto* sc : {sim, ens, swp}) sc->add_option("config", cfg_path, "Configuration file")->required();

    std::string snapshot;
    DiagnoseOptions diag;
    double x0 = 0, y0 = 0, r = 0, rd = 0, t = 0;
    auto* dia = app.add_subcommand("diagnose", "Pohozaev, defect and pairing diagnostics of a director snapshot");
    dia->add_option("snapshot", snapshot, "Director snapshot")->required();
    dia->add_flag("--pohozaev", diag.pohozaev);
    dia->add_flag("--defects", diag.defects);
    dia->add_flag("--pairings", diag.pairings);
    dia->add_option("--eps", diag.eps, "Ginzburg-Landau eps")->check(CLI::PositiveNumber);
    dia->add_option("--lx", diag.lx, "Domain length in x")->check(CLI::PositiveNumber);
    dia->add_option("--ly", diag.ly, "Domain length in y")->check(CLI::PositiveNumber);
    auto* ox = dia->add_option("--x0", x0, "Pohozaev ball centre x");
    auto* oy = dia->add_option("--y0", y0, "Pohozaev ball centre y");
    auto* orr = dia->add_option("--radius", r, "Pohozaev ball radius")->check(CLI::PositiveNumber);
    auto* ord = dia->add_option("--defect-radius", rd, "Defect ball radius")->check(CLI::PositiveNumber);
    auto* ot = dia->add_option("--delta0sq", t, "Defect energy threshold")->check(CLI::PositiveNumber);

    auto* self = app.add_subcommand("selftest", "Invariant checks on built-in fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::validation;
    }

    try {
        if (self->parsed()) return run_selftest(std::cout) ? Exit::ok : Exit::numerical;
        if (dia->parsed()) {
            if (*ox) diag.x0 = x0;
            if (*oy) diag.y0 = y0;
            if (*orr) diag.r = r;
            if (*ord) diag.defect_radius = rd;
            if (*ot) diag.delta0_sq = t;
            std::cout << diagnose_snapshot(snapshot, diag);
            return Exit::ok;
        }
        const RunConfig cfg = load_config(cfg_path);
        const auto root = out_root(cfg);
        RunOutput out;
        if (sim->parsed()) out = simulate_workflow(cfg, root);
        if (ens->parsed()) out = ensemble_workflow(cfg, root, threads);
        if (swp->parsed()) out = sweep_workflow(cfg, root, threads);
        std::cout << out.summary << "output: " << out.dir.string() << "\n";
        return Exit::ok;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return Exit::io;
    } catch (const StabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::validation;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::validation;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::validation;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::validation;
    } catch (const BlowUpError& e) {
        std::cerr << "numerical failure at step " << e.step() << " (t = " << e.time() << "): " << e.what()
                  << "\n";
        return Exit::numerical;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return Exit::numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::numerical;
    }
}
