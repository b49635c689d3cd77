#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "selflow/errors.hpp"
#include "selflow/grid.hpp"
#include "selflow/vec.hpp"

namespace selflow {

/// Grid-attached array of K-vectors: scalars (K=1), velocities (K=2),
/// directors and magnetic fields (K=3).
template <std::size_t K>
class Field {
public:
    using value_type = Vec<K>;
    static constexpr std::size_t components = K;

    explicit Field(const Grid& grid, value_type fill = value_type{})
        : grid_(grid), values_(grid.size(), fill) {}

    template <class F>
    static Field from_function(const Grid& grid, F&& f) {
        Field out(grid);
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) out(i, j) = f(grid.x(i), grid.y(j));
        return out;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    value_type& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    const value_type& operator()(int i, int j) const noexcept {
        return values_[grid_.index(i, j)];
    }
    value_type& operator[](std::size_t n) noexcept { return values_[n]; }
    const value_type& operator[](std::size_t n) const noexcept { return values_[n]; }

    std::span<value_type> values() noexcept { return values_; }
    std::span<const value_type> values() const noexcept { return values_; }
    /// Flat view: component c of node n sits at K * n + c.
    std::span<const double> flat() const noexcept {
        return {values_.empty() ? nullptr : values_.front().data(), K * values_.size()};
    }
    std::span<double> flat() noexcept {
        return {values_.empty() ? nullptr : values_.front().data(), K * values_.size()};
    }

    bool all_finite() const noexcept {
        return std::all_of(flat().begin(), flat().end(),
                           [](double v) { return std::isfinite(v); });
    }
    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::sqrt(norm_sq(v)));
        return m;
    }

    void fill(const value_type& v) { std::fill(values_.begin(), values_.end(), v); }

    Field& operator+=(const Field& o) {
        require_same_grid(o);
        for (std::size_t n = 0; n < values_.size(); ++n)
            for (std::size_t c = 0; c < K; ++c) values_[n][c] += o.values_[n][c];
        return *this;
    }
    Field& operator-=(const Field& o) {
        require_same_grid(o);
        for (std::size_t n = 0; n < values_.size(); ++n)
            for (std::size_t c = 0; c < K; ++c) values_[n][c] -= o.values_[n][c];
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& v : values_)
            for (auto& c : v) c *= s;
        return *this;
    }
    /// this += s * o
    Field& axpy(double s, const Field& o) {
        require_same_grid(o);
        for (std::size_t n = 0; n < values_.size(); ++n)
            for (std::size_t c = 0; c < K; ++c) values_[n][c] += s * o.values_[n][c];
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    friend bool operator==(const Field& a, const Field& b) {
        return a.grid_ == b.grid_ && a.values_ == b.values_;
    }

    void require_same_grid(const Grid& g) const {
        if (!(grid_ == g)) throw ShapeError("field is attached to a different grid");
    }
    template <std::size_t J>
    void require_same_grid(const Field<J>& o) const {
        require_same_grid(o.grid());
    }

private:
    Grid grid_;
    std::vector<value_type> values_;
};

using ScalarField = Field<1>;
using VectorField = Field<2>;
using DirectorField = Field<3>;

/// Partial derivatives of every component.
template <std::size_t K>
struct FieldGradient {
    Field<K> dx;
    Field<K> dy;
};

/// Pointwise map between fields on the same grid.
template <std::size_t J, std::size_t K, class F>
Field<K> pointwise(const Field<J>& in, F&& f) {
    Field<K> out(in.grid());
    for (std::size_t n = 0; n < in.size(); ++n) out[n] = f(in[n]);
    return out;
}

}  // namespace selflow
