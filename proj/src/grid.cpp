#include "selflow/grid.hpp"

#include "selflow/errors.hpp"

namespace selflow {

Grid::Grid(int nx, int ny, double lx, double ly, VelocityBc bc_velocity, DirectorBc bc_director)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), bc_velocity_(bc_velocity), bc_director_(bc_director) {
    if (nx < 4 || ny < 4) throw ArgumentError("grid needs at least 4 nodes per direction");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ArgumentError("domain lengths must be positive");
    const bool pu = bc_velocity == VelocityBc::periodic;
    const bool pd = bc_director == DirectorBc::periodic;
    if (pu != pd)
        throw ArgumentError("periodic boundary conditions apply to velocity and director together");
    hx_ = pu ? lx / nx : lx / (nx - 1);
    hy_ = pu ? ly / ny : ly / (ny - 1);
}

Grid Grid::periodic(int nx, int ny, double lx, double ly) {
    return Grid(nx, ny, lx, ly, VelocityBc::periodic, DirectorBc::periodic);
}

Grid Grid::bounded(int nx, int ny, DirectorBc director, double lx, double ly) {
    return Grid(nx, ny, lx, ly, VelocityBc::no_slip, director);
}

Boundary Grid::velocity_boundary() const noexcept {
    return is_periodic() ? Boundary::periodic : Boundary::fixed;
}

Boundary Grid::director_boundary() const noexcept {
    switch (bc_director_) {
        case DirectorBc::periodic: return Boundary::periodic;
        case DirectorBc::neumann: return Boundary::reflect;
        case DirectorBc::dirichlet: return Boundary::fixed;
    }
    return Boundary::reflect;
}

Boundary Grid::scalar_boundary() const noexcept {
    return is_periodic() ? Boundary::periodic : Boundary::reflect;
}

bool Grid::on_boundary(int i, int j) const noexcept {
    if (is_periodic()) return false;
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
}

double Grid::weight(int i, int j) const noexcept {
    double w = hx_ * hy_;
    if (!is_periodic()) {
        if (i == 0 || i == nx_ - 1) w *= 0.5;
        if (j == 0 || j == ny_ - 1) w *= 0.5;
    }
    return w;
}

unsigned char Grid::bc_code() const noexcept {
    if (is_periodic()) return 0;
    return bc_director_ == DirectorBc::neumann ? 1 : 2;
}

Grid Grid::from_bc_code(unsigned char code, int nx, int ny, double lx, double ly) {
    switch (code) {
        case 0: return periodic(nx, ny, lx, ly);
        case 1: return bounded(nx, ny, DirectorBc::neumann, lx, ly);
        case 2: return bounded(nx, ny, DirectorBc::dirichlet, lx, ly);
        default: throw ArgumentError("unknown boundary code " + std::to_string(code));
    }
}

std::string to_string(VelocityBc bc) { return bc == VelocityBc::periodic ? "periodic" : "no-slip"; }

std::string to_string(DirectorBc bc) {
    switch (bc) {
        case DirectorBc::neumann: return "neumann";
        case DirectorBc::periodic: return "periodic";
        case DirectorBc::dirichlet: return "dirichlet";
    }
    return "neumann";
}

}  // namespace selflow
