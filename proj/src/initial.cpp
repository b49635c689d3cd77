#include "selflow/initial.hpp"

#include <cmath>
#include <numbers>

#include "selflow/projection.hpp"

namespace selflow {

VectorField taylor_green(const Grid& grid, int k, double amp) {
    const double kx = 2.0 * std::numbers::pi * k / grid.lx();
    const double ky = 2.0 * std::numbers::pi * k / grid.ly();
    const double c = amp / std::hypot(kx, ky);
    const VectorField v = VectorField::from_function(grid, [&](double x, double y) {
        return Vec2{c * ky * std::sin(kx * x) * std::cos(ky * y),
                    -c * kx * std::cos(kx * x) * std::sin(ky * y)};
    });
    return leray_project(v, 1e-12).u;
}

DirectorField texture_director(const Grid& grid, double amp) {
    constexpr double tp = 2.0 * std::numbers::pi;
    return DirectorField::from_function(grid, [&](double x, double y) {
        const double X = x / grid.lx(), Y = y / grid.ly();
        const double t = amp * std::cos(tp * X) * std::cos(tp * Y);
        const double s = 0.5 * amp * std::cos(2.0 * tp * X);
        return Vec3{std::cos(t) * std::cos(s), std::sin(t) * std::cos(s), std::sin(s)};
    });
}

DirectorField skew_texture_director(const Grid& grid, double amp) {
    constexpr double tp = 2.0 * std::numbers::pi;
    return DirectorField::from_function(grid, [&](double x, double y) {
        const double X = x / grid.lx(), Y = y / grid.ly();
        const double t = amp * (std::cos(tp * (X + Y)) + 0.4 * std::sin(tp * Y + 1.0) + 0.3 * std::sin(tp * X + 2.0));
        const double s = amp * (0.5 * std::sin(tp * (X - Y)) + 0.25 * std::cos(tp * (X + 2.0 * Y) + 0.5));
        return Vec3{std::cos(t) * std::cos(s), std::sin(t) * std::cos(s), std::sin(s)};
    });
}

DirectorField wave_field(const Grid& grid, double amp) {
    constexpr double tp = 2.0 * std::numbers::pi;
    return DirectorField::from_function(grid, [&](double x, double y) {
        return Vec3{amp * std::sin(tp * y / grid.ly()), amp * std::cos(tp * x / grid.lx()), 1.0};
    });
}

DirectorField vortex_director(const Grid& grid, double xc, double yc, double core) {
    if (!(core > 0.0)) throw ArgumentError("vortex core size must be positive");
    return DirectorField::from_function(grid, [&](double x, double y) {
        const double dx = x - xc, dy = y - yc;
        const double s = 1.0 / std::sqrt(dx * dx + dy * dy + core * core);
        return Vec3{dx * s, dy * s, 0.0};
    });
}

}  // namespace selflow
