#pragma once

#include <span>
#include <string>
#include <vector>

#include "selflow/dynamics.hpp"

namespace selflow {

/// Every term of the Ito energy identity at one instant.
struct EnergyRecord {
    double t = 0.0;
    double kinetic = 0.0;        ///< 1/2 ||u||^2
    double dirichlet = 0.0;      ///< 1/2 ||grad d||^2 (edge form)
    double penalty = 0.0;        ///< int F_eps(d)
    double total = 0.0;          ///< kinetic + lambda (dirichlet + penalty)
    double dissipation_u = 0.0;  ///< int |grad u|^2
    double dissipation_d = 0.0;  ///< int |lap d - f_eps(d)|^2
    double hs = 0.0;             ///< xi1^2 / 2 sum_i ||S(u) e_i||^2
    double strat_drift = 0.0;    ///< 1/2 int <grad d, grad((d x h) x h)> + |grad(d x h)|^2
    double ledger1 = 0.0;
    double ledger2 = 0.0;

    static const std::vector<std::string>& column_names();
    std::vector<double> columns() const;
};

EnergyRecord energy_record(const SimState& s, const Params& p, const NoiseOperator& noise,
                           const MagneticField& h, LerayProjector& proj);
/// Convenience overload using the stepper's operators.
EnergyRecord energy_record(const SimState& s, Stepper& stepper);

/// Discrete defect of the energy identity over [records.front().t,
/// records.back().t]:
///
///   total(b) - total(a) + int (mu D_u + lambda gamma D_d) dt
///     - int (hs + lambda xi2^2 strat_drift) dt
///     - xi1 (ledger1(b) - ledger1(a)) + lambda xi2 (ledger2(b) - ledger2(a))
///
/// with left-endpoint time integrals, so records must be taken at every
/// step. Zero for the continuum identity. Throws ArgumentError for fewer
/// than two records or non-increasing times.
double energy_budget_residual(std::span<const EnergyRecord> records, const Params& p);

/// Streaming form of energy_budget_residual(): feed every step's record.
class BudgetAccumulator {
public:
    explicit BudgetAccumulator(const Params& p) : p_(p) {}
    void add(const EnergyRecord& r);
    double residual() const;
    /// int (mu D_u + lambda gamma D_d) dt so far.
    double dissipated() const noexcept { return dissipated_; }
    bool empty() const noexcept { return count_ == 0; }

private:
    Params p_;
    std::size_t count_ = 0;
    EnergyRecord first_{}, last_{};
    double dissipated_ = 0.0;
    double injected_ = 0.0;
};

/// Total energy alone (no noise terms), cheap enough for every step.
double total_energy(const SimState& s, const Params& p);

}  // namespace selflow
