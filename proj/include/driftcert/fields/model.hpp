#pragma once

// The planar quadratic SDE
//
//   dX = (a1 X - alpha1 X^2 + Y^2) dt + sqrt(2 kappa1) dB1
//   dY = (a2 Y - alpha2 X Y)       dt + sqrt(2 kappa2) dB2
//
// and its generator L = b . grad + kappa1 d_xx + kappa2 d_yy.

#include <cmath>
#include <stdexcept>
#include <string>

#include "driftcert/fields/jet.hpp"

namespace driftcert {

struct ModelParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double kappa1 = 0.0;
    double kappa2 = 1.0;

    ModelParams() = default;
    ModelParams(double a1_, double a2_, double alpha1_, double alpha2_, double kappa1_, double kappa2_)
        : a1(a1_), a2(a2_), alpha1(alpha1_), alpha2(alpha2_), kappa1(kappa1_), kappa2(kappa2_) {
        validate();
    }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(a1) || !finite(a2) || !finite(alpha1) || !finite(alpha2) || !finite(kappa1) ||
            !finite(kappa2))
            throw std::invalid_argument("model parameters must be finite");
        if (!(alpha1 > 0.0)) throw std::invalid_argument("alpha1 must be > 0");
        if (!(alpha2 > 0.0)) throw std::invalid_argument("alpha2 must be > 0");
        if (!(kappa1 >= 0.0)) throw std::invalid_argument("kappa1 must be >= 0");
        if (!(kappa2 > 0.0)) throw std::invalid_argument("kappa2 must be > 0");
    }

    ModelParams with_kappa(double k1, double k2) const { return {a1, a2, alpha1, alpha2, k1, k2}; }
    ModelParams with_alpha(double al1, double al2) const { return {a1, a2, al1, al2, kappa1, kappa2}; }

    bool ergodic_regime() const { return alpha2 > alpha1; }
    bool explosive_regime() const { return alpha1 > alpha2; }
};

// Turbulent transport with frozen separation R and Hoelder exponent h:
// a = (-1, -1), alpha = (h / R, (1 + h) / R).
inline ModelParams turbulent_preset(double h, double R, double kappa1, double kappa2) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("turbulent preset needs h in (0,1)");
    if (!(R > 0.0)) throw std::invalid_argument("turbulent preset needs R > 0");
    return {-1.0, -1.0, h / R, (1.0 + h) / R, kappa1, kappa2};
}

// dZ = (-Z - Z^2) dt + noise, i.e. a = (-1,-1), alpha = (1,2).
inline ModelParams complex_preset(double kappa1, double kappa2) { return {-1.0, -1.0, 1.0, 2.0, kappa1, kappa2}; }

struct State {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
    friend bool operator==(const State&, const State&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 drift(const ModelParams& p, const State& z) {
    return {p.a1 * z.x - p.alpha1 * z.x * z.x + z.y * z.y, p.a2 * z.y - p.alpha2 * z.x * z.y};
}

inline double generator_apply(const ModelParams& p, const Jet2& j, const State& z) {
    const Vec2 b = drift(p, z);
    return b.x * j.dx + b.y * j.dy + p.kappa1 * j.dxx + p.kappa2 * j.dyy;
}

// L with the noise switched off (the deterministic flow's derivative).
inline double drift_derivative(const ModelParams& p, const Jet2& j, const State& z) {
    const Vec2 b = drift(p, z);
    return b.x * j.dx + b.y * j.dy;
}

}  // namespace driftcert
