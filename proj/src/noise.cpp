#include "selflow/noise.hpp"

#include <cmath>
#include <numbers>

#include "selflow/operators.hpp"
#include "selflow/rng.hpp"

namespace selflow {

WienerDriver::WienerDriver(std::uint64_t seed, int n_modes, int substeps)
    : seed_(seed), n_modes_(n_modes), substeps_(substeps) {
    if (n_modes < 0) throw ArgumentError("mode count must be non-negative");
    if (substeps < 1) throw ArgumentError("substeps must be at least 1");
}

Increments WienerDriver::sample(double dt) {
    if (!(dt >= 0.0)) throw ArgumentError("time step must be non-negative");
    Increments inc;
    inc.db.assign(static_cast<std::size_t>(n_modes_), 0.0);
    const double scale = std::sqrt(dt / substeps_);
    for (int s = 0; s < substeps_; ++s) {
        const std::uint64_t step = fine_step_ + static_cast<std::uint64_t>(s);
        for (int i = 0; i < n_modes_; ++i)
            inc.db[i] += keyed_normal(seed_, step, static_cast<std::uint32_t>(i));
        inc.dw2 += keyed_normal(seed_, step, w2_stream);
    }
    for (double& b : inc.db) b *= scale;
    inc.dw2 *= scale;
    fine_step_ += static_cast<std::uint64_t>(substeps_);
    return inc;
}

namespace {

std::vector<ScalarField> default_shapes(const Grid& g, int n) {
    std::vector<ScalarField> out;
    const double m = g.is_periodic() ? 2.0 : 1.0;
    for (int i = 1; i <= n; ++i) {
        const double kx = m * i * std::numbers::pi / g.lx();
        const double ky = m * i * std::numbers::pi / g.ly();
        out.push_back(ScalarField::from_function(
            g, [&](double x, double y) { return Vec<1>{std::cos(kx * x) * std::cos(ky * y)}; }));
    }
    return out;
}

}  // namespace

NoiseOperator::NoiseOperator(const Grid& grid, NoiseSpec spec)
    : NoiseOperator(grid, spec, default_shapes(grid, spec.modes)) {}

NoiseOperator::NoiseOperator(const Grid& grid, NoiseSpec spec, std::vector<ScalarField> shapes,
                             std::vector<VectorField> additive)
    : grid_(grid), spec_(spec), shapes_(std::move(shapes)), additive_(std::move(additive)) {
    if (spec_.modes < 0) throw ArgumentError("noise.modes must be non-negative");
    if (!(spec_.sigma0 >= 0.0)) throw ArgumentError("noise.sigma0 must be non-negative");
    if (static_cast<int>(shapes_.size()) != spec_.modes)
        throw ArgumentError("one shape function per noise mode is required");
    if (additive_.empty()) additive_.assign(shapes_.size(), VectorField(grid_));
    if (additive_.size() != shapes_.size())
        throw ArgumentError("one additive field per noise mode is required");
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
        shapes_[i].require_same_grid(grid_);
        additive_[i].require_same_grid(grid_);
        shape_sup_.push_back(shapes_[i].max_abs());
        additive_norm_.push_back(norm_l2(additive_[i]));
    }
}

double NoiseOperator::coefficient(int i) const {
    return spec_.sigma0 * std::pow(static_cast<double>(i + 1), -spec_.q);
}

VectorField NoiseOperator::mode(LerayProjector& proj, const VectorField& u, int i) const {
    VectorField v = additive_.at(i);
    const ScalarField& psi = shapes_.at(i);
    for (std::size_t n = 0; n < v.size(); ++n) {
        v[n][0] += psi[n][0] * u[n][0];
        v[n][1] += psi[n][0] * u[n][1];
    }
    v *= coefficient(i);
    return proj.apply(v);
}

VectorField NoiseOperator::unprojected(const VectorField& u, std::span<const double> db) const {
    if (static_cast<int>(db.size()) != spec_.modes)
        throw ArgumentError("increment count does not match the number of noise modes");
    u.require_same_grid(grid_);
    VectorField v(grid_);
    for (int i = 0; i < spec_.modes; ++i) {
        const double c = coefficient(i) * db[i];
        if (c == 0.0) continue;
        const ScalarField& psi = shapes_[i];
        const VectorField& g = additive_[i];
        for (std::size_t n = 0; n < v.size(); ++n) {
            v[n][0] += c * (psi[n][0] * u[n][0] + g[n][0]);
            v[n][1] += c * (psi[n][0] * u[n][1] + g[n][1]);
        }
    }
    return v;
}

VectorField NoiseOperator::apply(LerayProjector& proj, const VectorField& u,
                                 std::span<const double> db) const {
    return proj.apply(unprojected(u, db));
}

double NoiseOperator::hs_norm_sq(LerayProjector& proj, const VectorField& u) const {
    double s = 0.0;
    for (int i = 0; i < spec_.modes; ++i) {
        const VectorField m = mode(proj, u, i);
        s += inner_product(m, m);
    }
    return s;
}

double NoiseOperator::linear_growth_constant() const {
    // ||P x|| <= ||x||, so ||S(u) e_i||^2 <= 2 c_i^2 (|psi_i|_inf^2 ||u||^2 + ||g_i||^2).
    double a = 0.0, b = 0.0;
    for (int i = 0; i < spec_.modes; ++i) {
        const double c2 = coefficient(i) * coefficient(i);
        a += 2.0 * c2 * shape_sup_[i] * shape_sup_[i];
        b += 2.0 * c2 * additive_norm_[i] * additive_norm_[i];
    }
    return std::max(a, b);
}

MagneticField MagneticField::constant(const Grid& grid, const Vec3& value) {
    return {DirectorField(grid, value), "const:" + std::to_string(value[0]) + "," +
                                            std::to_string(value[1]) + "," +
                                            std::to_string(value[2])};
}

double MagneticField::sup_gradient() const {
    const Grid& g = h.grid();
    double m = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (i + 1 < g.nx() || g.is_periodic())
                m = std::max(m, std::sqrt(norm_sq(h((i + 1) % g.nx(), j) - h(i, j))) / g.hx());
            if (j + 1 < g.ny() || g.is_periodic())
                m = std::max(m, std::sqrt(norm_sq(h(i, (j + 1) % g.ny()) - h(i, j))) / g.hy());
        }
    }
    return m;
}

DirectorField apply_noise_d(const DirectorField& d, const DirectorField& h, double dw2) {
    d.require_same_grid(h);
    DirectorField out(d.grid());
    for (std::size_t n = 0; n < d.size(); ++n) out[n] = dw2 * cross(d[n], h[n]);
    return out;
}

double k2_norm(std::span<const double> coeffs) {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        s += coeffs[i] * coeffs[i] / (k * k);
    }
    return std::sqrt(s);
}

}  // namespace selflow
