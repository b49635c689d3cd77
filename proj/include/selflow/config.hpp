#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selflow/dynamics.hpp"
#include "selflow/errors.hpp"
#include "selflow/noise.hpp"

namespace selflow {

/// All problems found in one configuration text, each prefixed with its line.
class ConfigError : public ArgumentError {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Flat `key = value` run configuration. Every key has a default, so an
/// empty file is a valid configuration.
struct RunConfig {
    // sim.*
    int nx = 32, ny = 32;
    double lx = 1.0, ly = 1.0;
    std::string bc = "periodic";  ///< periodic | neumann | dirichlet
    double eps = 0.1;
    double mu = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
    std::optional<double> dt;  ///< empty means "auto"
    bool dt_override = false;
    double T = 0.1;
    double proj_tol = 1e-10;
    // noise.*
    std::uint64_t seed = 1;
    int modes = 8;
    double sigma0 = 1.0;
    double q = 1.5;
    double xi1 = 1.0;
    double xi2 = 1.0;
    // field.* and init.*
    std::string field_h = "const:0,0,1";  ///< const:a,b,c | wave:amp | file:path
    std::string init_u = "zero";          ///< zero | taylor-green:k,amp | file:path
    std::string init_d = "const:0,0,1";   ///< const:a,b,c | vortex:x0,y0,core | texture:amp | skew-texture:amp | file:path
    // out.* and run.*
    std::string out_dir = "runs";
    int checkpoint_every = 100;
    std::string mode = "simulate";
    // ensemble.*, sweep.*, diag.*
    int paths = 16;
    bool sup_every_step = false;
    std::vector<double> sweep_eps{0.2, 0.1, 0.05};
    bool budget = false;
    std::optional<double> defect_radius;  ///< empty means 8 h
    std::optional<double> delta0_sq;      ///< empty means the vortex calibration

    /// Sorted `key = value` lines; parse_config(canonical()) == *this.
    std::string canonical() const;
    /// 64-bit FNV-1a of canonical(), as 16 hex digits.
    std::string hash() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError listing every unknown key, duplicate, malformed value
/// and violated constraint with its line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Names of every recognised key, sorted.
std::vector<std::string> config_keys();

/// Objects built from a configuration, ready to step.
struct Problem {
    RunConfig config;
    Grid grid;
    Params params;
    NoiseSpec noise;
    MagneticField h;
    VectorField u0;
    DirectorField d0;
    std::size_t steps = 0;  ///< time steps to reach T
};

/// Builds grid, initial data and parameters. With sim.dt = auto the step is
/// the stability bound for min(eps, sweep eps when sweeping), shrunk so that
/// an integer number of steps reaches T. Throws StabilityError for an
/// explicit dt above the bound unless sim.dt_override is set.
Problem build_problem(const RunConfig& cfg);

/// Copy of `problem` at a different eps, keeping dt and the initial data.
Problem with_eps(const Problem& problem, double eps);

}  // namespace selflow
