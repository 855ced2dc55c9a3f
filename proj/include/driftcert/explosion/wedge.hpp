#pragma once

// The wedge U_{xi,M} = {x < -M, |xi y| < -x} around the negative x-axis,
// invariant and explosive for the noiseless flow when alpha1 > alpha2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcert/core/parallel.hpp"
#include "driftcert/fields/scalar_field.hpp"

namespace driftcert {

struct WedgeSpec {
    double xi = 1.0;
    double M = 1.0;
    double C_blow = 0.0;  // L0 psi1 >= C_blow psi1^2 on the wedge

    bool contains(const State& z) const { return -z.x > M && std::abs(xi * z.y) < -z.x; }
};

// psi1 = -x, psi2 = xi y - x, psi3 = -xi y - x.
inline double psi(int j, double xi, const State& z) {
    switch (j) {
        case 1: return -z.x;
        case 2: return xi * z.y - z.x;
        case 3: return -xi * z.y - z.x;
        default: throw std::invalid_argument("psi index must be in 1..3");
    }
}

// L0 psi_j: the noiseless generator on the linear functions psi_j.
inline double l0_psi(int j, const ModelParams& p, double xi, const State& z) {
    const Vec2 b = drift(p, z);
    switch (j) {
        case 1: return -b.x;
        case 2: return xi * b.y - b.x;
        case 3: return -xi * b.y - b.x;
        default: throw std::invalid_argument("psi index must be in 1..3");
    }
}

// The open window (alpha1 - alpha2)/2 < xi^-2 < alpha1 - alpha2.
inline bool in_xi_window(const ModelParams& p, double xi) {
    const double w = 1.0 / (xi * xi);
    const double gap = p.alpha1 - p.alpha2;
    return w > 0.5 * gap && w < gap;
}

// Wedge points for the radius band: |x| log-uniform on [max(M, lo), hi]
// half the time and uniform on the boundary layer (M, M + 1) otherwise;
// q = xi y / x uniform on (-1, 1).
inline Region wedge_region(double xi, double M) {
    auto draw = [xi, M](Stream& s, const Band& b) -> std::optional<State> {
        const double lo = std::max(M, b.lo);
        if (lo >= b.hi) return std::nullopt;
        const double sx = s.uniform() < 0.5 ? s.uniform(lo, std::min(b.hi, lo + 1.0)) : s.log_uniform(lo, b.hi);
        const double q = s.uniform(-1.0, 1.0);
        return State{-sx, q * sx / xi};
    };
    return {[xi, M](const State& z) { return -z.x > M && std::abs(xi * z.y) < -z.x; }, "U_{xi,M}", draw};
}

inline constexpr int kWedgeGridLevels = 60;
inline constexpr std::size_t kWedgeSamples = 10000;
inline constexpr int kMaxWedgeDoublings = 40;

struct WedgeCheck {
    bool invariance = false;  // L0 psi_j > 0 at every sample, j = 1..3
    double C = 0.0;           // largest grid C with L0 psi1 >= C psi1^2, 0 if none
};

inline WedgeCheck check_wedge(const ModelParams& p, double xi, double M, std::size_t n, std::uint64_t seed) {
    const Band band{M, 100.0 * M};
    const std::vector<State> pts = sample_region(wedge_region(xi, M), seed, n, band);
    WedgeCheck out;
    double ratio = std::numeric_limits<double>::infinity();  // min L0 psi1 / psi1^2
    out.invariance = true;
    for (const State& z : pts) {
        for (int j = 1; j <= 3; ++j)
            if (!(l0_psi(j, p, xi, z) > 0.0)) out.invariance = false;
        const double s = psi(1, xi, z);
        ratio = std::min(ratio, l0_psi(1, p, xi, z) / (s * s));
    }
    for (int k = 0; k < kWedgeGridLevels; ++k) {
        const double C = std::ldexp(1.0, -k);
        if (C <= ratio) {
            out.C = C;
            break;
        }
    }
    return out;
}

// xi^-2 = 0.75 (alpha1 - alpha2); M = 1, 2, 4, ... until the sampled checks
// hold at 10^4 points.
inline WedgeSpec choose_wedge(const ModelParams& p, std::uint64_t seed = 0x5EDCE) {
    if (!(p.alpha1 > p.alpha2))
        throw std::invalid_argument("explosive wedge needs alpha1 > alpha2 (ergodic regime otherwise)");
    WedgeSpec w;
    w.xi = 1.0 / std::sqrt(0.75 * (p.alpha1 - p.alpha2));
    double M = 1.0;
    for (int d = 0; d <= kMaxWedgeDoublings; ++d, M *= 2.0) {
        const WedgeCheck c = check_wedge(p, w.xi, M, kWedgeSamples, seed);
        if (c.invariance && c.C > 0.0) {
            w.M = M;
            w.C_blow = c.C;
            return w;
        }
    }
    throw std::runtime_error("no wedge offset M found up to 2^40");
}

}  // namespace driftcert
