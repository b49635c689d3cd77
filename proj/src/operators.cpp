#include "selflow/operators.hpp"

#include <algorithm>
#include <cmath>

namespace selflow {
namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Derivative of component data along one axis at index i of a line of n
// values accessed through `at`.
template <std::size_t K, class At>
Vec<K> line_derivative(At&& at, int i, int n, double h, Boundary rule) {
    Vec<K> out{};
    auto set = [&](const Vec<K>& a, const Vec<K>& b, const Vec<K>& c, double ca, double cb,
                   double cc) {
        for (std::size_t k = 0; k < K; ++k) out[k] = (ca * a[k] + cb * b[k] + cc * c[k]) / h;
    };
    if (rule == Boundary::periodic) {
        set(at(wrap(i + 1, n)), at(wrap(i - 1, n)), at(i), 0.5, -0.5, 0.0);
    } else if (i > 0 && i < n - 1) {
        set(at(i + 1), at(i - 1), at(i), 0.5, -0.5, 0.0);
    } else if (rule == Boundary::reflect) {
        // mirrored ghost: the normal derivative vanishes
    } else if (i == 0) {
        set(at(0), at(1), at(2), -1.5, 2.0, -0.5);
    } else {
        set(at(n - 1), at(n - 2), at(n - 3), 1.5, -2.0, 0.5);
    }
    return out;
}

template <std::size_t K, class At>
Vec<K> line_second(At&& at, int i, int n, double h, Boundary rule) {
    Vec<K> out{};
    int lo = i - 1, hi = i + 1;
    if (rule == Boundary::periodic) {
        lo = wrap(lo, n);
        hi = wrap(hi, n);
    } else if (i == 0 || i == n - 1) {
        if (rule == Boundary::fixed) return out;
        lo = i == 0 ? 1 : n - 2;
        hi = lo;
    }
    const Vec<K>& a = at(lo);
    const Vec<K>& b = at(i);
    const Vec<K>& c = at(hi);
    for (std::size_t k = 0; k < K; ++k) out[k] = (a[k] - 2.0 * b[k] + c[k]) / (h * h);
    return out;
}

bool interior(const Grid& g, int i, int j) {
    return g.is_periodic() || !g.on_boundary(i, j);
}

}  // namespace

template <std::size_t K>
FieldGradient<K> gradient(const Field<K>& f, Boundary rule) {
    const Grid& g = f.grid();
    FieldGradient<K> out{Field<K>(g), Field<K>(g)};
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out.dx(i, j) = line_derivative<K>([&](int a) -> const Vec<K>& { return f(a, j); },
                                              i, g.nx(), g.hx(), rule);
            out.dy(i, j) = line_derivative<K>([&](int b) -> const Vec<K>& { return f(i, b); },
                                              j, g.ny(), g.hy(), rule);
        }
    }
    return out;
}

ScalarField divergence(const VectorField& v, Boundary rule) {
    const Grid& g = v.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 ddx = line_derivative<2>(
                [&](int a) -> const Vec2& { return v(a, j); }, i, g.nx(), g.hx(), rule);
            const Vec2 ddy = line_derivative<2>(
                [&](int b) -> const Vec2& { return v(i, b); }, j, g.ny(), g.hy(), rule);
            out(i, j)[0] = ddx[0] + ddy[1];
        }
    }
    return out;
}

template <std::size_t K>
Field<K> laplacian(const Field<K>& f, Boundary rule) {
    const Grid& g = f.grid();
    Field<K> out(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (rule == Boundary::fixed && g.on_boundary(i, j)) continue;
            const Vec<K> xx = line_second<K>([&](int a) -> const Vec<K>& { return f(a, j); }, i,
                                             g.nx(), g.hx(), rule);
            const Vec<K> yy = line_second<K>([&](int b) -> const Vec<K>& { return f(i, b); }, j,
                                             g.ny(), g.hy(), rule);
            out(i, j) = xx + yy;
        }
    }
    return out;
}

ScalarField projection_divergence(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField out(g);
    const int nx = g.nx(), ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!interior(g, i, j)) continue;
            const int ip = wrap(i + 1, nx), im = wrap(i - 1, nx);
            const int jp = wrap(j + 1, ny), jm = wrap(j - 1, ny);
            // Bounded grids: the boundary ring of v is treated as zero.
            auto vx = [&](int a, int b) { return g.is_periodic() || !g.on_boundary(a, b) ? v(a, b)[0] : 0.0; };
            auto vy = [&](int a, int b) { return g.is_periodic() || !g.on_boundary(a, b) ? v(a, b)[1] : 0.0; };
            out(i, j)[0] = (vx(ip, j) - vx(im, j)) / (2.0 * g.hx()) +
                           (vy(i, jp) - vy(i, jm)) / (2.0 * g.hy());
        }
    }
    return out;
}

template <std::size_t K>
Field<K> advect(const VectorField& u, const Field<K>& f) {
    f.require_same_grid(u);
    const Grid& g = f.grid();
    Field<K> out(g);
    const int nx = g.nx(), ny = g.ny();
    const double ax = 0.25 / g.hx(), ay = 0.25 / g.hy();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!interior(g, i, j)) continue;
            const int ip = wrap(i + 1, nx), im = wrap(i - 1, nx);
            const int jp = wrap(j + 1, ny), jm = wrap(j - 1, ny);
            const Vec2& uc = u(i, j);
            const double uxp = u(ip, j)[0], uxm = u(im, j)[0];
            const double uyp = u(i, jp)[1], uym = u(i, jm)[1];
            auto& o = out(i, j);
            for (std::size_t k = 0; k < K; ++k) {
                const double fxp = f(ip, j)[k], fxm = f(im, j)[k];
                const double fyp = f(i, jp)[k], fym = f(i, jm)[k];
                // 1/2 [u.grad f] + 1/2 [div(u f)], both central
                o[k] = ax * (uc[0] * (fxp - fxm) + (uxp * fxp - uxm * fxm)) +
                       ay * (uc[1] * (fyp - fym) + (uyp * fyp - uym * fym));
            }
        }
    }
    return out;
}

template <std::size_t K>
VectorField advect_adjoint(const Field<K>& f, const Field<K>& w) {
    f.require_same_grid(w);
    const Grid& g = f.grid();
    VectorField out(g);
    const int nx = g.nx(), ny = g.ny();
    const double ax = 0.25 / g.hx(), ay = 0.25 / g.hy();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!interior(g, i, j)) continue;
            const int ip = wrap(i + 1, nx), im = wrap(i - 1, nx);
            const int jp = wrap(j + 1, ny), jm = wrap(j - 1, ny);
            const Vec<K>& fc = f(i, j);
            const Vec<K>& wc = w(i, j);
            // advect() has no boundary rows, so boundary values of w never enter
            const auto wv = [&](int a, int b, std::size_t k) {
                return interior(g, a, b) ? w(a, b)[k] : 0.0;
            };
            double sx = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                sx += (f(ip, j)[k] - f(im, j)[k]) * wc[k] - fc[k] * (wv(ip, j, k) - wv(im, j, k));
                sy += (f(i, jp)[k] - f(i, jm)[k]) * wc[k] - fc[k] * (wv(i, jp, k) - wv(i, jm, k));
            }
            out(i, j) = {ax * sx, ay * sy};
        }
    }
    return out;
}

template <std::size_t K>
double inner_product(const Field<K>& f, const Field<K>& g) {
    f.require_same_grid(g);
    const Grid& gr = f.grid();
    double s = 0.0;
    for (int j = 0; j < gr.ny(); ++j)
        for (int i = 0; i < gr.nx(); ++i) s += gr.weight(i, j) * dot(f(i, j), g(i, j));
    return s;
}

template <std::size_t K>
double norm_l2(const Field<K>& f) {
    return std::sqrt(inner_product(f, f));
}

double integrate(const ScalarField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) s += g.weight(i, j) * f(i, j)[0];
    return s;
}

template <std::size_t K>
double dirichlet_form(const Field<K>& f, const Field<K>& g, Boundary rule) {
    f.require_same_grid(g);
    const Grid& gr = f.grid();
    const int nx = gr.nx(), ny = gr.ny();
    const bool per = rule == Boundary::periodic;
    auto edge_weight = [&](int n, int k) { return !per && (k == 0 || k == n - 1) ? 0.5 : 1.0; };
    double sx = 0.0, sy = 0.0;
    for (int j = 0; j < ny; ++j) {
        const int imax = per ? nx : nx - 1;
        double row = 0.0;
        for (int i = 0; i < imax; ++i) {
            const int ip = wrap(i + 1, nx);
            const Vec<K> df = f(ip, j) - f(i, j);
            const Vec<K> dg = g(ip, j) - g(i, j);
            row += dot(df, dg);
        }
        sx += edge_weight(ny, j) * row;
    }
    for (int i = 0; i < nx; ++i) {
        const int jmax = per ? ny : ny - 1;
        double col = 0.0;
        for (int j = 0; j < jmax; ++j) {
            const int jp = wrap(j + 1, ny);
            const Vec<K> df = f(i, jp) - f(i, j);
            const Vec<K> dg = g(i, jp) - g(i, j);
            col += dot(df, dg);
        }
        sy += edge_weight(nx, i) * col;
    }
    return sx * gr.hy() / gr.hx() + sy * gr.hx() / gr.hy();
}

template <std::size_t K>
Vec<K> interpolate(const Field<K>& f, double x, double y) {
    const Grid& g = f.grid();
    double fx = x / g.hx(), fy = y / g.hy();
    int i0, j0, i1, j1;
    if (g.is_periodic()) {
        const double bx = std::floor(fx), by = std::floor(fy);
        fx -= bx;
        fy -= by;
        i0 = wrap(static_cast<int>(bx), g.nx());
        j0 = wrap(static_cast<int>(by), g.ny());
        i1 = wrap(i0 + 1, g.nx());
        j1 = wrap(j0 + 1, g.ny());
    } else {
        fx = std::clamp(fx, 0.0, static_cast<double>(g.nx() - 1));
        fy = std::clamp(fy, 0.0, static_cast<double>(g.ny() - 1));
        i0 = std::min(static_cast<int>(fx), g.nx() - 2);
        j0 = std::min(static_cast<int>(fy), g.ny() - 2);
        fx -= i0;
        fy -= j0;
        i1 = i0 + 1;
        j1 = j0 + 1;
    }
    Vec<K> out{};
    const Vec<K>& a = f(i0, j0);
    const Vec<K>& b = f(i1, j0);
    const Vec<K>& c = f(i0, j1);
    const Vec<K>& d = f(i1, j1);
    for (std::size_t k = 0; k < K; ++k)
        out[k] = (1 - fy) * ((1 - fx) * a[k] + fx * b[k]) + fy * ((1 - fx) * c[k] + fx * d[k]);
    return out;
}

#define SELFLOW_INSTANTIATE(K)                                                        \
    template FieldGradient<K> gradient<K>(const Field<K>&, Boundary);                 \
    template Field<K> laplacian<K>(const Field<K>&, Boundary);                        \
    template Field<K> advect<K>(const VectorField&, const Field<K>&);                 \
    template VectorField advect_adjoint<K>(const Field<K>&, const Field<K>&);         \
    template double inner_product<K>(const Field<K>&, const Field<K>&);               \
    template double norm_l2<K>(const Field<K>&);                                      \
    template double dirichlet_form<K>(const Field<K>&, const Field<K>&, Boundary);    \
    template Vec<K> interpolate<K>(const Field<K>&, double, double);

SELFLOW_INSTANTIATE(1)
SELFLOW_INSTANTIATE(2)
SELFLOW_INSTANTIATE(3)
#undef SELFLOW_INSTANTIATE

}  // namespace selflow
