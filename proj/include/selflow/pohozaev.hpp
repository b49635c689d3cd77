#pragma once

#include <string>
#include <vector>

#include "selflow/field.hpp"

namespace selflow {

/// Multiplier field X in the Pohozaev identity, relative to the ball centre.
enum class Multiplier {
    radial,      ///< X = x
    first_axis,  ///< X = (x1, 0)
    shear,       ///< X = (0, x1)
};

std::string to_string(Multiplier m);

/// Terms of the Pohozaev identity on B_r(x0) for tau = lap d - f_eps(d):
///
///   boundary_flux + stress_bulk + energy_bulk + energy_flux = rhs
///
///   boundary_flux =  int_{dB} <X . grad d, d_nu d>
///   stress_bulk   = -int_B  <grad d (.) grad d, grad X>
///   energy_bulk   =  int_B  div X e_eps(d)
///   energy_flux   = -int_{dB} e_eps(d) <X, nu>
///   rhs           =  int_B  <X . grad d, tau>
struct PohozaevReport {
    double x0 = 0.0, y0 = 0.0, r = 0.0;
    Multiplier multiplier = Multiplier::radial;
    double boundary_flux = 0.0;
    double stress_bulk = 0.0;
    double energy_bulk = 0.0;
    double energy_flux = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

/// Ball integrals use polar Gauss-Legendre x trapezoid quadrature of the
/// bilinearly interpolated node fields; circle integrals the trapezoid rule.
/// Throws GeometryError unless the ball keeps one cell clear of a
/// non-periodic boundary (or fits in half the period).
PohozaevReport pohozaev_residual(const DirectorField& d, double eps, double x0, double y0,
                                 double r, Multiplier multiplier);

/// Pointwise e_eps(d) = 1/2 |grad d|^2 + F_eps(d).
ScalarField energy_density(const DirectorField& d, double eps);

/// int_{B_r(x0)} e_eps(d). Throws GeometryError when the ball leaves a
/// non-periodic domain.
double local_energy(const DirectorField& d, double eps, double x0, double y0, double r);
double local_energy(const ScalarField& density, double x0, double y0, double r);

struct DefectCenter {
    double x = 0.0, y = 0.0;
    double energy = 0.0;
};

/// Candidate concentration set at fixed eps. This is a finite-eps proxy of a
/// liminf-in-eps definition and should be read as a heuristic.
struct DefectReport {
    double r = 0.0;
    double threshold = 0.0;  ///< delta0^2
    std::vector<DefectCenter> centers;
    std::size_t count() const noexcept { return centers.size(); }
};

/// Scans ball centres on a lattice of `stride` nodes, keeps lattice local
/// maxima of the local energy, refines each by hill-climbing on the node
/// grid, then accepts them in decreasing energy order when above the
/// threshold and at least 2r from every accepted centre. A larger threshold
/// therefore always yields a subset of centres.
DefectReport defect_detect(const DirectorField& d, double eps, double r, double delta0_sq,
                           int stride = 0);

/// 0.3 times the local energy of an isolated vortex with core max(eps, 2h),
/// measured on a ball of radius 8h around its core.
double default_defect_threshold(const Grid& grid, double eps);
inline double default_defect_radius(const Grid& grid) { return 8.0 * grid.h_min(); }

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace selflow
