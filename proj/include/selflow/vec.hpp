#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace selflow {

template <std::size_t K>
using Vec = std::array<double, K>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <std::size_t K>
constexpr double dot(const Vec<K>& a, const Vec<K>& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < K; ++c) s += a[c] * b[c];
    return s;
}

template <std::size_t K>
constexpr double norm_sq(const Vec<K>& a) { return dot(a, a); }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

template <std::size_t K>
constexpr Vec<K> operator+(Vec<K> a, const Vec<K>& b) {
    for (std::size_t c = 0; c < K; ++c) a[c] += b[c];
    return a;
}

template <std::size_t K>
constexpr Vec<K> operator-(Vec<K> a, const Vec<K>& b) {
    for (std::size_t c = 0; c < K; ++c) a[c] -= b[c];
    return a;
}

template <std::size_t K>
constexpr Vec<K> operator*(double s, Vec<K> a) {
    for (std::size_t c = 0; c < K; ++c) a[c] *= s;
    return a;
}

}  // namespace selflow
