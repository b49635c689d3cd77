#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace selflow {

enum class VelocityBc { no_slip, periodic };
enum class DirectorBc { neumann, periodic, dirichlet };

/// How a stencil treats the edge of a non-periodic domain.
///  - periodic:   indices wrap.
///  - reflect:    mirrored ghost values (homogeneous Neumann).
///  - fixed:      boundary values are prescribed; derivatives there are
///                one-sided second order and the Laplacian is zero.
enum class Boundary { periodic, reflect, fixed };

/// Rectangular node-centred grid on [0, lx] x [0, ly].
///
/// Non-periodic grids put nodes on both edges (h = l / (n - 1)); periodic
/// grids omit the duplicate right/top edge (h = l / n).
class Grid {
public:
    Grid(int nx, int ny, double lx = 1.0, double ly = 1.0,
         VelocityBc bc_velocity = VelocityBc::periodic,
         DirectorBc bc_director = DirectorBc::periodic);

    /// Unit-square convenience constructors.
    static Grid periodic(int nx, int ny, double lx = 1.0, double ly = 1.0);
    static Grid bounded(int nx, int ny, DirectorBc director = DirectorBc::neumann,
                        double lx = 1.0, double ly = 1.0);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double h_min() const noexcept { return hx_ < hy_ ? hx_ : hy_; }
    VelocityBc bc_velocity() const noexcept { return bc_velocity_; }
    DirectorBc bc_director() const noexcept { return bc_director_; }
    bool is_periodic() const noexcept { return bc_velocity_ == VelocityBc::periodic; }

    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    /// Row-major with x fastest.
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * nx_ + i;
    }
    double x(int i) const noexcept { return i * hx_; }
    double y(int j) const noexcept { return j * hy_; }

    Boundary velocity_boundary() const noexcept;
    Boundary director_boundary() const noexcept;
    /// Rule for scalars such as pressure, densities and test-function shapes.
    Boundary scalar_boundary() const noexcept;

    /// Quadrature weight of node (i, j): rectangle rule when periodic,
    /// trapezoidal otherwise.
    double weight(int i, int j) const noexcept;
    bool on_boundary(int i, int j) const noexcept;

    /// Single-byte code used by the snapshot format.
    unsigned char bc_code() const noexcept;
    static Grid from_bc_code(unsigned char code, int nx, int ny, double lx = 1.0,
                             double ly = 1.0);

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.lx_ == b.lx_ && a.ly_ == b.ly_ &&
               a.bc_velocity_ == b.bc_velocity_ && a.bc_director_ == b.bc_director_;
    }

private:
    int nx_, ny_;
    double lx_, ly_;
    VelocityBc bc_velocity_;
    DirectorBc bc_director_;
    double hx_, hy_;
};

std::string to_string(VelocityBc bc);
std::string to_string(DirectorBc bc);

}  // namespace selflow
