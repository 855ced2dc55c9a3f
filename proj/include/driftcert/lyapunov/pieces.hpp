#pragma once

// The five local Lyapunov functions, their regions U_i, the shrunken
// regions V_i and the overlaps U_i cap U_{i+1}.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "driftcert/fields/scalar_field.hpp"
#include "driftcert/lyapunov/appendix.hpp"

namespace driftcert {

namespace jets {

// |x|^p for x != 0.
inline Jet2 abs_pow_x(double p, const State& z) {
    const double s = std::abs(z.x);
    const double e = z.x < 0 ? -1.0 : 1.0;
    const double sp = std::pow(s, p);
    return {sp, e * p * sp / s, 0.0, p * (p - 1.0) * sp / (s * s), 0.0, 0.0};
}

// |y|^p for y != 0.
inline Jet2 abs_pow_y(double p, const State& z) {
    const double u = std::abs(z.y);
    const double e = z.y < 0 ? -1.0 : 1.0;
    const double up = std::pow(u, p);
    return {up, 0.0, e * p * up / u, 0.0, 0.0, p * (p - 1.0) * up / (u * u)};
}

// (k x^2 + y^2)^p away from the origin.
inline Jet2 quad_pow(double k, double p, const State& z) {
    const double w = k * z.x * z.x + z.y * z.y;
    const double wp = std::pow(w, p);
    const double d1 = p * wp / w;                    // p w^(p-1)
    const double d2 = p * (p - 1.0) * wp / (w * w);  // p (p-1) w^(p-2)
    const double wx = 2.0 * k * z.x;
    const double wy = 2.0 * z.y;
    return {wp, d1 * wx, d1 * wy, d2 * wx * wx + d1 * 2.0 * k, d2 * wx * wy, d2 * wy * wy + d1 * 2.0};
}

}  // namespace jets

// phi_1 = C1 (5 |x|^beta - y^2 |x|^(beta+1)), x < 0.
inline Jet2 phi1_jet(const CoverParams& c, const State& z) {
    const double s = -z.x;
    const double b = c.beta;
    const double sb = std::pow(s, b);
    const double y = z.y;
    return c.C1 * Jet2{5.0 * sb - y * y * sb * s,
                       -5.0 * b * sb / s + y * y * (b + 1.0) * sb,
                       -2.0 * y * sb * s,
                       5.0 * b * (b - 1.0) * sb / (s * s) - y * y * (b + 1.0) * b * sb / s,
                       2.0 * y * (b + 1.0) * sb,
                       -2.0 * sb * s};
}

// phi_2 = C2 (|x|^(2 delta) + |y|^(2 delta)) |y|^(-2 sigma delta), x < 0, y != 0.
inline Jet2 phi2_jet(const CoverParams& c, const State& z) {
    const double a = 2.0 * c.delta;
    const double m = -2.0 * c.sigma * c.delta;
    const Jet2 cross = product(jets::abs_pow_x(a, z), jets::abs_pow_y(m, z));
    return c.C2 * (cross + jets::abs_pow_y(a + m, z));
}

// phi_3 = C3 ((D x^2 + y^2) / |y|^(2 sigma))^delta, y != 0.
inline Jet2 phi3_jet(const CoverParams& c, const State& z) {
    return c.C3 * product(jets::quad_pow(c.Dcap, c.delta, z), jets::abs_pow_y(-2.0 * c.sigma * c.delta, z));
}

// phi_4 = C4 (-x + N |y|^(2 (1 - sigma) delta)), y != 0.
inline Jet2 phi4_jet(const CoverParams& c, const State& z) {
    Jet2 j = c.Ncap * jets::abs_pow_y(2.0 * c.gamma, z);
    j.v -= z.x;
    j.dx -= 1.0;
    return c.C4 * j;
}

// phi_5 = C5 (eta x^2 + y^2)^gamma, z != 0.
inline Jet2 phi5_jet(const CoverParams& c, const State& z) {
    return c.C5 * jets::quad_pow(c.eta, c.gamma, z);
}

inline Jet2 piece_jet(int i, const CoverParams& c, const State& z) {
    switch (i) {
        case 1: return phi1_jet(c, z);
        case 2: return phi2_jet(c, z);
        case 3: return phi3_jet(c, z);
        case 4: return phi4_jet(c, z);
        case 5: return phi5_jet(c, z);
        default: throw std::invalid_argument("piece index must be in 1..5");
    }
}

// Points where the closed form of phi_i (not just U_i) is smooth.
inline bool piece_formula_defined(int i, const State& z) {
    switch (i) {
        case 1: return z.x < 0.0;
        case 2: return z.x < 0.0 && z.y != 0.0;
        case 3:
        case 4: return z.y != 0.0;
        case 5: return z.x != 0.0 || z.y != 0.0;
        default: return false;
    }
}

// ---------------------------------------------------------------------------
// Regions. Shapes shared by U_i and V_i, parametrized by their thresholds.

namespace shapes {

using Draw = std::function<std::optional<State>(Stream&, const Band&)>;

// {x < -x0} cap {|y| < c |x|^(-1/2)}
inline Region axis_cusp(double x0, double c, std::string name) {
    Draw draw = [x0, c](Stream& s, const Band& b) -> std::optional<State> {
        const double lo = std::max(x0, b.lo);
        if (lo >= b.hi) return std::nullopt;
        const double sx = s.log_uniform(lo, b.hi);
        const double y = c / std::sqrt(sx) * (2.0 * s.uniform() - 1.0);
        return State{-sx, y};
    };
    return {[x0, c](const State& z) { return z.x < -x0 && std::abs(z.y) * std::sqrt(-z.x) < c; }, std::move(name),
            draw};
}

// {x < -x0} cap {c |x|^(-1/2) < |y| < y1}
inline Region cusp_strip(double x0, double c, double y1, std::string name) {
    Draw draw = [x0, c, y1](Stream& s, const Band& b) -> std::optional<State> {
        const double lo = std::max(x0, std::sqrt(std::max(0.0, b.lo * b.lo - y1 * y1)));
        if (lo >= b.hi) return std::nullopt;
        const double sx = s.log_uniform(lo, b.hi);
        const double ylo = c / std::sqrt(sx);
        if (ylo >= y1) return std::nullopt;
        return State{-sx, s.sign() * s.uniform(ylo, y1)};
    };
    return {[x0, c, y1](const State& z) {
                if (!(z.x < -x0)) return false;
                const double u = std::abs(z.y);
                return u * std::sqrt(-z.x) > c && u < y1;
            },
            std::move(name), draw};
}

// {x < -x0} cap {|y| > y0}
inline Region left_quadrants(double x0, double y0, std::string name) {
    const double pi = std::numbers::pi;
    return {[x0, y0](const State& z) { return z.x < -x0 && std::abs(z.y) > y0; }, std::move(name),
            annulus_draw(0.5 * pi, 1.5 * pi)};
}

// {xl < x < xr} cap {|y| > y0}
inline Region vertical_strip(double xl, double xr, double y0, std::string name) {
    Draw draw = [xl, xr, y0](Stream& s, const Band& b) -> std::optional<State> {
        const double xmax = std::max(std::abs(xl), std::abs(xr));
        const double lo = std::max(y0, std::sqrt(std::max(0.0, b.lo * b.lo - xmax * xmax)));
        if (lo >= b.hi) return std::nullopt;
        return State{s.uniform(xl, xr), s.sign() * s.log_uniform(lo, b.hi)};
    };
    return {[xl, xr, y0](const State& z) { return z.x > xl && z.x < xr && std::abs(z.y) > y0; }, std::move(name),
            draw};
}

// {x > x0}
inline Region right_half(double x0, std::string name) {
    const double pi = std::numbers::pi;
    return {[x0](const State& z) { return z.x > x0; }, std::move(name), annulus_draw(-0.5 * pi, 0.5 * pi)};
}

// {x < -x0} cap {1 < |x|^(1/2) |y| < 2}, parametrized by q = |x|^(1/2)|y| - 1.
inline Region cusp_overlap(double x0, std::string name) {
    Draw draw = [x0](Stream& s, const Band& b) -> std::optional<State> {
        const double lo = std::max(x0, b.lo);
        if (lo >= b.hi) return std::nullopt;
        const double sx = s.log_uniform(lo, b.hi);
        const double q = s.uniform();
        return State{-sx, s.sign() * (1.0 + q) / std::sqrt(sx)};
    };
    return {[x0](const State& z) {
                if (!(z.x < -x0)) return false;
                const double w = std::abs(z.y) * std::sqrt(-z.x);
                return w > 1.0 && w < 2.0;
            },
            std::move(name), draw};
}

// {x < -x0} cap {y0 < |y| < y1}
inline Region horizontal_band(double x0, double y0, double y1, std::string name) {
    Draw draw = [x0, y0, y1](Stream& s, const Band& b) -> std::optional<State> {
        const double lo = std::max(x0, std::sqrt(std::max(0.0, b.lo * b.lo - y1 * y1)));
        if (lo >= b.hi) return std::nullopt;
        return State{-s.log_uniform(lo, b.hi), s.sign() * s.uniform(y0, y1)};
    };
    return {[x0, y0, y1](const State& z) {
                const double u = std::abs(z.y);
                return z.x < -x0 && u > y0 && u < y1;
            },
            std::move(name), draw};
}

}  // namespace shapes

// Membership in U_i without building a Region.
inline bool in_U(int i, const CoverParams& c, const State& z) {
    const double u = std::abs(z.y);
    switch (i) {
        case 1: return z.x < -2.0 && u * std::sqrt(-z.x) < 2.0;
        case 2: return z.x < -2.0 && u * std::sqrt(-z.x) > 1.0 && u < 2.0;
        case 3: return z.x < -0.5 && u > 1.0;
        case 4: return z.x > -1.0 && z.x < c.Ncap && u > 1.0;
        case 5: return z.x > 0.5 * c.Ncap;
        default: throw std::invalid_argument("region index must be in 1..5");
    }
}

inline Region region_U(int i, const CoverParams& c) {
    switch (i) {
        case 1: return shapes::axis_cusp(2.0, 2.0, "U1");
        case 2: return shapes::cusp_strip(2.0, 1.0, 2.0, "U2");
        case 3: return shapes::left_quadrants(0.5, 1.0, "U3");
        case 4: return shapes::vertical_strip(-1.0, c.Ncap, 1.0, "U4");
        case 5: return shapes::right_half(0.5 * c.Ncap, "U5");
        default: throw std::invalid_argument("region index must be in 1..5");
    }
}

// V_i: every defining inequality of U_i tightened by a fixed margin.
inline Region strong_subcover(int i, const CoverParams& c) {
    switch (i) {
        case 1: return shapes::axis_cusp(3.0, 1.5, "V1");
        case 2: return shapes::cusp_strip(3.0, 1.25, 1.75, "V2");
        case 3: return shapes::left_quadrants(0.6, 1.2, "V3");
        case 4: return shapes::vertical_strip(-0.9, 0.9 * c.Ncap, 1.2, "V4");
        case 5: return shapes::right_half(0.6 * c.Ncap, "V5");
        default: throw std::invalid_argument("region index must be in 1..5");
    }
}

// U_i cap U_{i+1} for i = 1..4.
inline Region overlap_region(int i, const CoverParams& c) {
    switch (i) {
        case 1: return shapes::cusp_overlap(2.0, "U1&U2");
        case 2: return shapes::horizontal_band(2.0, 1.0, 2.0, "U2&U3");
        case 3: return shapes::vertical_strip(-1.0, -0.5, 1.0, "U3&U4");
        case 4: return shapes::vertical_strip(0.5 * c.Ncap, c.Ncap, 1.0, "U4&U5");
        default: throw std::invalid_argument("overlap index must be in 1..4");
    }
}

// Radius beyond which V_1..V_5 cover the plane.
inline double subcover_radius(const CoverParams& c) {
    const double xr = std::max(3.0, 0.6 * c.Ncap);
    return std::sqrt(xr * xr + 1.2 * 1.2);
}

struct LyapunovPiece {
    ScalarField phi;
    Region region;
    int index = 0;
};

inline LyapunovPiece make_piece(int i, const ModelParams& p, const CoverParams& c) {
    if (i < 1 || i > 5) throw std::invalid_argument("piece index must be in 1..5");
    if (!consistent(p, c)) throw std::invalid_argument("cover parameters do not match the model");
    Region u = region_U(i, c);
    ScalarField f{[i, c](const State& z) { return piece_jet(i, c, z); }, u, "phi" + std::to_string(i)};
    return {std::move(f), std::move(u), i};
}

}  // namespace driftcert
