#pragma once

// Normalized cumulative of the bump f(t) = exp(-1 / (1 - (2t - 1)^2))
// on (0, 1). g is 0 for t <= 0, 1 for t >= 1, and g(1 - t) = 1 - g(t).

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "driftcert/fields/jet.hpp"

namespace driftcert {

inline double bump(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (4.0 * t * (1.0 - t)));
}

inline double bump_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = t * (1.0 - t);
    return bump(t) * (1.0 - 2.0 * t) / (4.0 * w * w);
}

namespace detail {

inline constexpr int kBumpCells = 1024;  // cells of width 1/1024 on [0, 1/2]

// Cumulative integral of the bump at the cell edges k / (2 kBumpCells).
inline const std::array<double, kBumpCells + 1>& bump_table() {
    static const auto table = [] {
        using boost::math::quadrature::gauss;
        std::array<double, kBumpCells + 1> t{};
        const double h = 0.5 / kBumpCells;
        for (int k = 0; k < kBumpCells; ++k) t[k + 1] = t[k] + gauss<double, 20>::integrate(bump, k * h, (k + 1) * h);
        return t;
    }();
    return table;
}

// Integral of the bump over [0, t] for t in [0, 1/2].
inline double bump_integral(double t) {
    if (t <= 0.0) return 0.0;
    using boost::math::quadrature::gauss;
    const auto& table = bump_table();
    const double h = 0.5 / kBumpCells;
    const int k = std::min(kBumpCells, static_cast<int>(t / h));
    const double a = k * h;
    return table[k] + (t > a ? gauss<double, 20>::integrate(bump, a, t) : 0.0);
}

}  // namespace detail

inline double bump_mass() {
    static const double mass = 2.0 * detail::bump_integral(0.5);
    return mass;
}

inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    if (t > 0.5) return 1.0 - smooth_step(1.0 - t);
    return detail::bump_integral(t) / bump_mass();
}

inline Jet1 smooth_step_jet(double t) {
    const double m = bump_mass();
    return {smooth_step(t), bump(t) / m, bump_derivative(t) / m};
}

// k(a t + b) as a one-variable jet in t.
inline Jet1 smooth_step_jet(double a, double b, double t) {
    const Jet1 k = smooth_step_jet(a * t + b);
    return {k.v, a * k.d1, a * a * k.d2};
}

}  // namespace driftcert
