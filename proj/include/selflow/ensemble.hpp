#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selflow/config.hpp"
#include "selflow/energy.hpp"
#include "selflow/pairing.hpp"

namespace selflow {

/// Seed of path `index`: splitmix64(base ^ splitmix64(index + 1)). Distinct
/// indices give distinct seeds because both maps are bijections.
std::uint64_t path_seed(std::uint64_t base, std::size_t index);

struct PathOptions {
    int checkpoint_every = 100;
    /// Track the energy supremum at every step instead of at checkpoints.
    bool sup_every_step = false;
    /// Record every step and evaluate the energy budget residual.
    bool budget = false;
    /// Time-integrated stress pairings against these test functions.
    std::vector<VelocityTest> pairing_tests;
    /// Called after every step.
    std::function<void(const SimState&, const StepInfo&)> on_step;
};

/// Per-step monitors, maximised over the run.
struct Monitors {
    double max_divergence = 0.0;  ///< max |div u| after a step
    double max_transport = 0.0;   ///< max |<adv(u,u),u>| / (1 + ||u||^3)
    double max_director = 0.0;    ///< max |d| at checkpoints
};

struct PathResult {
    std::uint64_t seed = 0;
    /// Records at t = 0, every checkpoint_every steps, and at T.
    std::vector<EnergyRecord> checkpoints;
    /// Running supremum of the total energy up to each checkpoint.
    std::vector<double> running_sup;
    double sup_total = 0.0;
    /// int_0^T (mu D_u + lambda gamma D_d) dt, left-endpoint rule.
    double dissipated = 0.0;
    std::optional<double> budget_residual;
    /// Budget residual from t = 0 to each checkpoint, when tracked.
    std::vector<double> budget_at_checkpoints;
    Monitors monitors;
    /// Monitors over the steps since the previous checkpoint.
    std::vector<Monitors> checkpoint_monitors;
    /// Stress pairings at each checkpoint, [checkpoint][test].
    std::vector<std::vector<double>> pairings;
    /// int_0^T stress pairing dt per test, left-endpoint rule.
    std::vector<double> pairing_integrals;
    std::optional<SimState> final_state;
};

/// Steps `problem` from 0 to T with the Wiener path of `seed`. Deterministic
/// in (problem, seed, options). BlowUpError propagates with the failing step.
PathResult run_path(const Problem& problem, std::uint64_t seed, const PathOptions& options = {});

/// Mean, variance, extremes with pairwise (Chan et al.) merging.
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x);
    static RunningStats merge(const RunningStats& a, const RunningStats& b);
    /// Unbiased sample variance; zero for n < 2.
    double variance() const;
    /// Standard error of the mean; NaN for n < 2.
    double se() const;
    friend bool operator==(const RunningStats&, const RunningStats&) = default;
};

/// Scalars reduced over paths: "sup_total", "dissipated", "ledger1",
/// "ledger2", "martingale1" (xi1 ledger1), "martingale2" (lambda xi2 ledger2),
/// "sphere_excess" (mean of |d(T)|^2 - 1), "budget_residual" when tracked.
struct EnsembleStats {
    std::size_t paths = 0;
    std::vector<double> times;
    /// [checkpoint][EnergyRecord column]
    std::vector<std::vector<RunningStats>> records;
    std::map<std::string, RunningStats> scalars;
    friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

std::map<std::string, double> path_scalars(const PathResult& r, const Params& p);

/// Reduces per-path results in index order with a fixed binary tree, so the
/// result does not depend on the order paths finished.
EnsembleStats reduce_paths(const std::vector<PathResult>& results, const Params& p);

struct EnsembleSpec {
    int paths = 16;
    std::uint64_t base_seed = 1;
    int threads = 1;  ///< 0: hardware concurrency
    PathOptions options;
    /// Execution order of path indices; empty means 0..M-1.
    std::vector<std::size_t> order;
};

struct EnsembleResult {
    std::vector<PathResult> paths;  ///< indexed by path, whatever the execution order
    EnsembleStats stats;
};

EnsembleResult run_ensemble(const Problem& problem, const EnsembleSpec& spec);

/// Sample mean with its standard error.
struct MeanTest {
    double mean = 0.0;
    double se = 0.0;
    bool within(double k) const { return std::abs(mean) <= k * se; }
};

/// Means of the two martingale terms at T.
std::pair<MeanTest, MeanTest> martingale_test(const EnsembleStats& stats);

/// Expectation-level energy bounds from a two-horizon ensemble.
struct GronwallReport {
    double T0 = 0.0;
    double initial_energy = 0.0;
    RunningStats sup_T0, sup_2T0;        ///< E sup_{[0,T]} total
    RunningStats dissipated_2T0;
    double growth_constant = 0.0;        ///< C in d(a + E) <= C (a + E)
    double offset = 1.0;                 ///< a
    double log_increase = 0.0;           ///< log(a + E sup(2T0)) - log(a + E sup(T0))
    double slack = 0.0;                  ///< 3 standard errors on the log scale
    bool growth_ok = false;
    bool zero_noise = false;
    bool no_growth_ok = true;            ///< zero noise: every path sup <= E(0)
    double moment2_half = 0.0, moment2_full = 0.0, moment2_se = 0.0;
    bool moment_ok = false;              ///< E sup^2 stable when M doubles
    bool passed() const { return growth_ok && no_growth_ok && moment_ok; }
};

/// Runs the ensemble to 2 T0 and compares the energy supremum over [0, T0]
/// and [0, 2 T0] path by path.
GronwallReport gronwall_bound_check(const Problem& problem, const EnsembleSpec& spec, double T0);

/// Growth constant C and offset a for the energy inequality of `problem`.
std::pair<double, double> gronwall_constants(const Problem& problem);

/// One eps of a coupled sweep.
struct SweepLevel {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> pairings;  ///< [checkpoint][test]
    std::vector<double> penalty;                ///< int F_eps at checkpoints
    std::vector<double> sphere_deviation;       ///< || |d|^2 - 1 || at checkpoints
    std::vector<std::size_t> defects;           ///< defect_detect count at checkpoints
    std::vector<double> pairing_integrals;      ///< int_0^T pairing dt per test
    double sup_penalty = 0.0;                   ///< sup of int F_eps over every step
};

struct SweepTable {
    std::uint64_t seed = 0;
    std::vector<std::string> tests;
    std::vector<SweepLevel> levels;
    /// [gap k][test]: |int pairing(eps_k) - int pairing(eps_k+1)|.
    std::vector<std::vector<double>> cauchy;
    /// [gap k][test]: the same at t = T.
    std::vector<std::vector<double>> cauchy_final;
    bool concentration = false;  ///< defect_detect fired at some level
};

/// Same initial data, dt and Wiener path (seed) for every eps in the
/// strictly decreasing list. dt must be stable for the smallest eps.
SweepTable epsilon_sweep(const Problem& problem, const std::vector<double>& eps_list,
                         std::uint64_t seed, const std::vector<VelocityTest>& tests,
                         int checkpoint_every);

struct CoupledSweep {
    std::vector<SweepTable> paths;
    /// [gap][test] statistics of the time-integrated Cauchy differences.
    std::vector<std::vector<RunningStats>> cauchy;
    std::vector<RunningStats> sup_penalty;  ///< per eps
    std::vector<RunningStats> final_sphere_deviation;  ///< per eps
};

CoupledSweep coupled_sweep(const Problem& problem, const EnsembleSpec& spec,
                           const std::vector<double>& eps_list,
                           const std::vector<VelocityTest>& tests);

}  // namespace selflow
