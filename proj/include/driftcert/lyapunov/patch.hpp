#pragma once

// Gluing: phi_{i,i+1} = rho phi_{i+1} + (1 - rho) phi_i on U_i cup U_{i+1},
// and the global function Phi built from the pieces and patches outside a
// ball, filled with 1 + |z|^2 inside it.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcert/lyapunov/pieces.hpp"
#include "driftcert/lyapunov/smooth_step.hpp"

namespace driftcert {

// Jet of the blend function rho_{i,i+1}.
inline Jet2 blend_jet(int i, const CoverParams& c, const State& z) {
    switch (i) {
        case 1: {
            // g(|x|^(1/2) |y| - 1)
            Jet2 q = product(jets::abs_pow_x(0.5, z), jets::abs_pow_y(1.0, z));
            q.v -= 1.0;
            return compose(smooth_step_jet(q.v), q);
        }
        case 2: {
            // k(|y| - 1)
            Jet2 t = jets::abs_pow_y(1.0, z);
            t.v -= 1.0;
            return compose(smooth_step_jet(t.v), t);
        }
        case 3: return compose(smooth_step_jet(2.0 * z.x + 2.0), Jet2{2.0 * z.x + 2.0, 2.0, 0, 0, 0, 0});
        case 4: {
            const double a = 2.0 / c.Ncap;
            return compose(smooth_step_jet(a * z.x - 1.0), Jet2{a * z.x - 1.0, a, 0, 0, 0, 0});
        }
        default: throw std::invalid_argument("patch index must be in 1..4");
    }
}

// Where the patched function is defined and smooth: the overlap, plus the
// parts of U_i (U_{i+1}) on which rho is identically 0 (1).
inline Region patch_domain(int i, const CoverParams& c) {
    if (i < 1 || i > 4) throw std::invalid_argument("patch index must be in 1..4");
    Region ui = region_U(i, c);
    Region un = region_U(i + 1, c);
    Region ov = overlap_region(i, c);
    auto contains = [i, c, ui, un](const State& z) {
        const bool a = ui.contains(z);
        const bool b = un.contains(z);
        if (a && b) return true;
        if (!a && !b) return false;
        const double rho = blend_jet(i, c, z).v;
        return a ? rho == 0.0 : rho == 1.0;
    };
    return {contains, ui.describe + "|" + un.describe, ov.draw};
}

inline Jet2 patch_jet(int i, const CoverParams& c, const State& z) {
    const Jet2 rho = blend_jet(i, c, z);
    if (rho.v == 0.0 && rho.dx == 0.0 && rho.dy == 0.0) return piece_jet(i, c, z);
    if (rho.v == 1.0 && rho.dx == 0.0 && rho.dy == 0.0) return piece_jet(i + 1, c, z);
    if (!piece_formula_defined(i, z) || !piece_formula_defined(i + 1, z))
        throw std::domain_error("patch " + std::to_string(i) + " evaluated outside its domain");
    return blend(rho, piece_jet(i, c, z), piece_jet(i + 1, c, z));
}

inline ScalarField patch(int i, const ModelParams& p, const CoverParams& c) {
    if (!consistent(p, c)) throw std::invalid_argument("cover parameters do not match the model");
    Region dom = patch_domain(i, c);
    return {[i, c](const State& z) { return patch_jet(i, c, z); }, dom,
            "phi" + std::to_string(i) + std::to_string(i + 1)};
}

// Right-hand side of the generator identity for a patch, term by term:
//   rho L phi_{i+1} + (1 - rho) L phi_i + b1 Dphi rho_x + b2 Dphi rho_y
//   + kappa1 (Dphi rho_xx + 2 (Dphi)_x rho_x) + kappa2 (Dphi rho_yy + 2 (Dphi)_y rho_y)
// with Dphi = phi_{i+1} - phi_i.
struct PatchTerms {
    double blended = 0.0;  // rho L phi_{i+1} + (1 - rho) L phi_i
    double drift_x = 0.0;
    double drift_y = 0.0;
    double diffusion_x = 0.0;
    double diffusion_y = 0.0;

    double sum() const { return blended + drift_x + drift_y + diffusion_x + diffusion_y; }
    double magnitude() const {
        return std::abs(blended) + std::abs(drift_x) + std::abs(drift_y) + std::abs(diffusion_x) +
               std::abs(diffusion_y);
    }
};

inline PatchTerms lpatch_terms(int i, const ModelParams& p, const CoverParams& c, const State& z) {
    const Jet2 rho = blend_jet(i, c, z);
    const Jet2 lo = piece_jet(i, c, z);
    const Jet2 hi = piece_jet(i + 1, c, z);
    const Jet2 d = hi - lo;
    const Vec2 b = drift(p, z);
    PatchTerms t;
    t.blended = rho.v * generator_apply(p, hi, z) + (1.0 - rho.v) * generator_apply(p, lo, z);
    t.drift_x = b.x * d.v * rho.dx;
    t.drift_y = b.y * d.v * rho.dy;
    t.diffusion_x = p.kappa1 * (d.v * rho.dxx + 2.0 * d.dx * rho.dx);
    t.diffusion_y = p.kappa2 * (d.v * rho.dyy + 2.0 * d.dy * rho.dy);
    return t;
}

// |L phi_{i,i+1} - RHS| relative to the sum of the RHS term magnitudes.
inline double lpatch_relative_error(int i, const ModelParams& p, const CoverParams& c, const State& z) {
    const Jet2 rho = blend_jet(i, c, z);
    const Jet2 direct_jet = blend(rho, piece_jet(i, c, z), piece_jet(i + 1, c, z));
    const double direct = generator_apply(p, direct_jet, z);
    const PatchTerms t = lpatch_terms(i, p, c, z);
    const double scale = std::max(t.magnitude(), 1e-300);
    return std::abs(direct - t.sum()) / scale;
}

// log10 of the height |y| above which phi5 - phi4 < 0 on the whole strip
// N/2 < x < N, ignoring the (1 + eta x^2/y^2)^gamma factor. Below it the
// drift term b1 (phi5 - phi4) d_x rho45 ~ y^2 is positive.
inline double patch45_crossover_log10(const CoverParams& c) {
    const double gap = c.Ncap * c.C4 - c.C5;
    if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log10(c.C4 * c.Ncap / gap) / (2.0 * c.gamma);
}

// Radii of the global construction. Beyond `seam` each point lies in one
// U_i or in exactly one consecutive overlap, and the pieces join smoothly.
struct GlueRadii {
    double subcover = 0.0;  // V_1..V_5 cover |z| > subcover
    double seam = 0.0;      // pieces/patches are seamless for |z| > seam
    double R = 0.0;         // Phi is the glued function on |z| >= R
};

inline GlueRadii glue_radii(const CoverParams& c) {
    GlueRadii g;
    g.subcover = subcover_radius(c);
    const double N = c.Ncap;
    // U1 cap U3 reaches |z|^2 < 16 + 1; the steps at x = -2 (1 < |y| < 2) and
    // at |y| = 1 (N/2 < x < N); the uncovered set |y| <= 1, -2 <= x <= N/2.
    const double uncovered = std::hypot(std::max(2.0, 0.5 * N), 1.0);
    g.seam = std::max({std::sqrt(17.0), std::sqrt(8.0), std::hypot(N, 1.0), uncovered});
    g.R = std::max({g.subcover, g.seam / 0.8, 10.0});
    return g;
}

inline Jet2 outer_phi_jet(const CoverParams& c, const State& z) {
    std::array<bool, 6> in{};
    for (int i = 1; i <= 5; ++i) in[i] = in_U(i, c, z);
    for (int i = 1; i <= 4; ++i)
        if (in[i] && in[i + 1]) return patch_jet(i, c, z);
    for (int i = 1; i <= 5; ++i)
        if (in[i]) return piece_jet(i, c, z);
    throw std::domain_error("point not covered by U_1..U_5");
}

// The plane with a sampler that mixes the strong subcover pieces, the four
// overlaps and the plain annulus, so thin overlaps are hit as often as the
// wide regions. Every stratum is a subset of the plane, so the certificate
// still speaks about the whole annulus.
inline Region stratified_plane(const CoverParams& c) {
    std::vector<Region> strata;
    for (int i = 1; i <= 5; ++i) strata.push_back(strong_subcover(i, c));
    for (int i = 1; i <= 4; ++i) strata.push_back(overlap_region(i, c));
    strata.push_back(whole_plane());
    auto draw = [strata](Stream& s, const Band& b) -> std::optional<State> {
        const auto k = static_cast<std::size_t>(s.uniform() * static_cast<double>(strata.size()));
        return strata[std::min(k, strata.size() - 1)].draw(s, b);
    };
    return {[](const State&) { return true; }, "annulus", draw};
}

struct GlobalPhi {
    ScalarField field;
    GlueRadii radii;
    double R() const { return radii.R; }
};

inline GlobalPhi global_phi(const ModelParams& p, const CoverParams& c) {
    if (!(p.alpha2 > p.alpha1)) throw std::invalid_argument("global Lyapunov function needs alpha2 > alpha1");
    if (!consistent(p, c)) throw std::invalid_argument("cover parameters do not match the model");
    const GlueRadii radii = glue_radii(c);
    const double R = radii.R;
    auto jet = [c, R](const State& z) {
        const double r = z.norm();
        const Jet2 inner{1.0 + r * r, 2.0 * z.x, 2.0 * z.y, 2.0, 0.0, 2.0};
        if (r <= 0.8 * R) return inner;
        const Jet2 outer = outer_phi_jet(c, z);
        if (r >= R) return outer;
        const double r3 = r * r * r;
        const double w = 0.2 * R;
        const Jet2 t{(r - 0.8 * R) / w, z.x / (r * w), z.y / (r * w), z.y * z.y / (r3 * w), -z.x * z.y / (r3 * w),
                     z.x * z.x / (r3 * w)};
        return blend(compose(smooth_step_jet(t.v), t), inner, outer);
    };
    return {{jet, whole_plane(), "Phi"}, radii};
}

}  // namespace driftcert
