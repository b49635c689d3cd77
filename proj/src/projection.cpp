#include "selflow/projection.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include "selflow/operators.hpp"

namespace selflow {
namespace {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v[0]));
    return m;
}

void remove_mean(ScalarField& p) {
    const double mean = integrate(p) / (p.grid().lx() * p.grid().ly());
    for (auto& v : p.values()) v[0] -= mean;
}

}  // namespace

struct LerayProjector::Impl {
    Grid grid;
    double tol;
    int max_iter;

    // spectral path
    int nc = 0;  // complex columns nx/2 + 1
    std::unique_ptr<double, FftwFree> real_buf;
    std::unique_ptr<fftw_complex, FftwFree> spec_x, spec_y;
    fftw_plan forward = nullptr;
    fftw_plan backward_x = nullptr;
    fftw_plan backward_y = nullptr;
    std::vector<double> kx, ky;  // sin(theta) / h, exactly zero on null modes

    explicit Impl(const Grid& g, double t, int m) : grid(g), tol(t), max_iter(m) {
        if (grid.is_periodic()) init_fft();
        if (max_iter <= 0) max_iter = 20 * static_cast<int>(grid.size()) + 100;
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward_x) fftw_destroy_plan(backward_x);
        if (backward_y) fftw_destroy_plan(backward_y);
    }

    static double symbol(int k, int n, double h) {
        if (k == 0 || 2 * k == n) return 0.0;
        return std::sin(2.0 * std::numbers::pi * k / n) / h;
    }

    void init_fft() {
        const int nx = grid.nx(), ny = grid.ny();
        nc = nx / 2 + 1;
        const std::size_t ncomplex = static_cast<std::size_t>(ny) * nc;
        real_buf.reset(static_cast<double*>(fftw_malloc(sizeof(double) * grid.size())));
        spec_x.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex)));
        spec_y.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex)));
        {
            std::lock_guard lock(planner_mutex());
            forward = fftw_plan_dft_r2c_2d(ny, nx, real_buf.get(), spec_x.get(), FFTW_ESTIMATE);
            backward_x = fftw_plan_dft_c2r_2d(ny, nx, spec_x.get(), real_buf.get(), FFTW_ESTIMATE);
            backward_y = fftw_plan_dft_c2r_2d(ny, nx, spec_y.get(), real_buf.get(), FFTW_ESTIMATE);
        }
        kx.resize(nc);
        ky.resize(ny);
        for (int a = 0; a < nc; ++a) kx[a] = symbol(a, nx, grid.hx());
        for (int b = 0; b < ny; ++b) ky[b] = symbol(b, ny, grid.hy());
    }

    Projection spectral(const VectorField& v) {
        const std::size_t n = grid.size();
        const double inv_n = 1.0 / static_cast<double>(n);
        auto* rb = real_buf.get();
        for (std::size_t i = 0; i < n; ++i) rb[i] = v[i][0];
        fftw_execute_dft_r2c(forward, rb, spec_x.get());
        for (std::size_t i = 0; i < n; ++i) rb[i] = v[i][1];
        fftw_execute_dft_r2c(forward, rb, spec_y.get());

        std::vector<std::complex<double>> pres(static_cast<std::size_t>(grid.ny()) * nc);
        auto* sx = reinterpret_cast<std::complex<double>*>(spec_x.get());
        auto* sy = reinterpret_cast<std::complex<double>*>(spec_y.get());
        for (int b = 0; b < grid.ny(); ++b) {
            for (int a = 0; a < nc; ++a) {
                const std::size_t m = static_cast<std::size_t>(b) * nc + a;
                const double k1 = kx[a], k2 = ky[b];
                const double kk = k1 * k1 + k2 * k2;
                if (kk == 0.0) continue;
                const std::complex<double> kv = k1 * sx[m] + k2 * sy[m];
                sx[m] -= k1 * kv / kk;
                sy[m] -= k2 * kv / kk;
                pres[m] = std::complex<double>(0.0, -1.0) * kv / kk;
            }
        }
        Projection out{VectorField(grid), ScalarField(grid), 0, 0.0};
        fftw_execute_dft_c2r(backward_x, spec_x.get(), rb);
        for (std::size_t i = 0; i < n; ++i) out.u[i][0] = rb[i] * inv_n;
        fftw_execute_dft_c2r(backward_y, spec_y.get(), rb);
        for (std::size_t i = 0; i < n; ++i) out.u[i][1] = rb[i] * inv_n;
        // reuse spec_x for the pressure
        std::copy(pres.begin(), pres.end(), sx);
        fftw_execute_dft_c2r(backward_x, spec_x.get(), rb);
        for (std::size_t i = 0; i < n; ++i) out.p[i][0] = rb[i] * inv_n;
        out.divergence = max_abs(projection_divergence(out.u));
        return out;
    }

    // D^T q on interior nodes; q vanishes on the boundary ring.
    VectorField div_adjoint(const ScalarField& q) const {
        VectorField out(grid);
        const double cx = 0.5 / grid.hx(), cy = 0.5 / grid.hy();
        for (int j = 1; j < grid.ny() - 1; ++j)
            for (int i = 1; i < grid.nx() - 1; ++i)
                out(i, j) = {cx * (q(i - 1, j)[0] - q(i + 1, j)[0]),
                             cy * (q(i, j - 1)[0] - q(i, j + 1)[0])};
        return out;
    }

    static double dot_flat(const ScalarField& a, const ScalarField& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i][0] * b[i][0];
        return s;
    }

    Projection conjugate_gradient(const VectorField& v) {
        VectorField vin = v;
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i)
                if (grid.on_boundary(i, j)) vin(i, j) = {0.0, 0.0};

        ScalarField q(grid);
        ScalarField r = projection_divergence(vin);
        ScalarField dir = r;
        double rr = dot_flat(r, r);
        const double target = 0.25 * tol;
        int it = 0;
        while (max_abs(r) > target && it < max_iter) {
            const ScalarField ad = projection_divergence(div_adjoint(dir));
            const double dad = dot_flat(dir, ad);
            if (!(dad > 0.0)) break;
            const double alpha = rr / dad;
            q.axpy(alpha, dir);
            r.axpy(-alpha, ad);
            if ((it + 1) % 50 == 0) {
                // replace the recursive residual to stop round-off drift
                r = projection_divergence(vin - div_adjoint(q));
            }
            const double rr_new = dot_flat(r, r);
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < dir.size(); ++i) dir[i][0] = r[i][0] + beta * dir[i][0];
            ++it;
        }
        Projection out{vin - div_adjoint(q), ScalarField(grid), it, 0.0};
        out.divergence = max_abs(projection_divergence(out.u));
        if (!(out.divergence <= tol))
            throw ConvergenceError("pressure solve did not reach the divergence tolerance",
                                   out.divergence);
        // p = -q; boundary ring copied from the nearest interior node.
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                const int a = std::clamp(i, 1, grid.nx() - 2);
                const int b = std::clamp(j, 1, grid.ny() - 2);
                out.p(i, j)[0] = -q(a, b)[0];
            }
        }
        return out;
    }
};

LerayProjector::LerayProjector(const Grid& grid, double tolerance, int max_iterations)
    : impl_(std::make_unique<Impl>(grid, tolerance, max_iterations)) {}
LerayProjector::~LerayProjector() = default;
LerayProjector::LerayProjector(LerayProjector&&) noexcept = default;
LerayProjector& LerayProjector::operator=(LerayProjector&&) noexcept = default;

const Grid& LerayProjector::grid() const noexcept { return impl_->grid; }
double LerayProjector::tolerance() const noexcept { return impl_->tol; }

Projection LerayProjector::project(const VectorField& v) {
    v.require_same_grid(impl_->grid);
    if (!v.all_finite()) throw ArgumentError("cannot project a non-finite field");
    Projection out = impl_->grid.is_periodic() ? impl_->spectral(v) : impl_->conjugate_gradient(v);
    remove_mean(out.p);
    return out;
}

Projection leray_project(const VectorField& v, double tolerance) {
    LerayProjector proj(v.grid(), tolerance);
    return proj.project(v);
}

}  // namespace selflow
