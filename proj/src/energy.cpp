#include "selflow/energy.hpp"

#include "selflow/operators.hpp"

namespace selflow {
namespace {

DirectorField masked_w(const DirectorField& d, double eps) {
    const Grid& g = d.grid();
    DirectorField w = laplacian(d, g.director_boundary());
    w -= gl_force(d, eps);
    if (g.director_boundary() == Boundary::fixed)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.on_boundary(i, j)) w(i, j) = {0.0, 0.0, 0.0};
    return w;
}

}  // namespace

const std::vector<std::string>& EnergyRecord::column_names() {
    static const std::vector<std::string> names{
        "t",          "kinetic", "dirichlet",   "penalty", "total",  "dissipation_u",
        "dissipation_d", "hs",   "strat_drift", "ledger1", "ledger2"};
    return names;
}

std::vector<double> EnergyRecord::columns() const {
    return {t, kinetic, dirichlet, penalty, total, dissipation_u, dissipation_d,
            hs, strat_drift, ledger1, ledger2};
}

double total_energy(const SimState& s, const Params& p) {
    const Grid& g = s.d.grid();
    const double kinetic = 0.5 * inner_product(s.u, s.u);
    const double dirichlet = 0.5 * dirichlet_form(s.d, s.d, g.director_boundary());
    const double penalty = integrate(penalty_density(s.d, p.eps));
    return kinetic + p.lambda * (dirichlet + penalty);
}

EnergyRecord energy_record(const SimState& s, const Params& p, const NoiseOperator& noise,
                           const MagneticField& h, LerayProjector& proj) {
    const Grid& g = s.d.grid();
    const Boundary db = g.director_boundary();
    EnergyRecord r;
    r.t = s.t;
    r.kinetic = 0.5 * inner_product(s.u, s.u);
    r.dirichlet = 0.5 * dirichlet_form(s.d, s.d, db);
    r.penalty = integrate(penalty_density(s.d, p.eps));
    r.total = r.kinetic + p.lambda * (r.dirichlet + r.penalty);
    r.dissipation_u = dirichlet_form(s.u, s.u, g.velocity_boundary());
    const DirectorField w = masked_w(s.d, p.eps);
    r.dissipation_d = inner_product(w, w);
    r.hs = p.xi1 == 0.0 ? 0.0 : 0.5 * p.xi1 * p.xi1 * noise.hs_norm_sq(proj, s.u);
    DirectorField dxh(g), dxhxh(g);
    for (std::size_t n = 0; n < s.d.size(); ++n) {
        dxh[n] = cross(s.d[n], h.h[n]);
        dxhxh[n] = cross(dxh[n], h.h[n]);
    }
    r.strat_drift = 0.5 * (dirichlet_form(s.d, dxhxh, db) + dirichlet_form(dxh, dxh, db));
    r.ledger1 = s.ledger1;
    r.ledger2 = s.ledger2;
    return r;
}

EnergyRecord energy_record(const SimState& s, Stepper& stepper) {
    return energy_record(s, stepper.params(), stepper.noise(), stepper.field_h(),
                         stepper.projector());
}

void BudgetAccumulator::add(const EnergyRecord& r) {
    if (count_ == 0) {
        first_ = r;
    } else {
        if (!(r.t > last_.t)) throw ArgumentError("energy records must have increasing times");
        const double dt = r.t - last_.t;
        dissipated_ += dt * (p_.mu * last_.dissipation_u + p_.lambda * p_.gamma * last_.dissipation_d);
        injected_ += dt * (last_.hs + p_.lambda * p_.xi2 * p_.xi2 * last_.strat_drift);
    }
    last_ = r;
    ++count_;
}

double BudgetAccumulator::residual() const {
    if (count_ < 2) throw ArgumentError("energy budget needs at least two records");
    return (last_.total - first_.total) + dissipated_ - injected_ -
           p_.xi1 * (last_.ledger1 - first_.ledger1) +
           p_.lambda * p_.xi2 * (last_.ledger2 - first_.ledger2);
}

double energy_budget_residual(std::span<const EnergyRecord> records, const Params& p) {
    BudgetAccumulator acc(p);
    for (const auto& r : records) acc.add(r);
    return acc.residual();
}

}  // namespace selflow
