#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "selflow/config.hpp"
#include "selflow/ensemble.hpp"

namespace selflow {

/// Version stamp written into every run manifest.
inline constexpr int output_format_version = 1;

struct RunOutput {
    std::filesystem::path dir;
    std::string summary;  ///< short human-readable report, also saved as report.txt
};

/// `<out_root>/<mode>-<config hash>`.
std::filesystem::path run_directory(const RunConfig& cfg, const std::filesystem::path& out_root);

// Each workflow validates the configuration and builds the problem before it
// creates the run directory, so a rejected configuration leaves no output.
// The configuration's run.mode is replaced by the workflow's own mode.

/// One path: energy.csv, monitors.csv and director/velocity snapshots at
/// every checkpoint.
RunOutput simulate_workflow(RunConfig cfg, const std::filesystem::path& out_root);

/// ensemble.paths paths: summary.csv, scalars.csv and paths/path_NNNN.csv.
RunOutput ensemble_workflow(RunConfig cfg, const std::filesystem::path& out_root, int threads = 1);

/// Coupled sweep over sweep.eps with ensemble.paths shared-seed paths:
/// sweep_levels.csv, cauchy.csv and sweep_summary.csv.
RunOutput sweep_workflow(RunConfig cfg, const std::filesystem::path& out_root, int threads = 1);

struct DiagnoseOptions {
    bool pohozaev = false;
    bool defects = false;
    bool pairings = false;  ///< none of the three selected means all of them
    double lx = 1.0, ly = 1.0;
    double eps = 0.1;
    std::optional<double> x0, y0, r;  ///< Pohozaev ball; default centre, r = min(lx, ly) / 4
    std::optional<double> defect_radius, delta0_sq;
};

/// Diagnostics of a director snapshot as CSV sections.
std::string diagnose_snapshot(const std::filesystem::path& snapshot, const DiagnoseOptions& options);

/// Invariant checks on small built-in fixtures; one `ok`/`FAIL` line each.
bool run_selftest(std::ostream& os);

}  // namespace selflow
