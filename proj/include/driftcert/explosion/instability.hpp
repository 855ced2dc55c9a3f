#pragma once

// g = h rho with h = exp(1/(x+M)) for x < -M and rho = f(xi y / x),
// f(t) = exp(-1/(1-t^2)) on (-1,1). g is smooth, supported on the closed
// wedge and satisfies L g >= C g when the wedge is explosive.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftcert/core/format.hpp"
#include "driftcert/explosion/wedge.hpp"
#include "driftcert/lyapunov/certificate.hpp"

namespace driftcert {

// Jet of g divided by g, from the closed forms. Empty outside the open wedge.
inline std::optional<Jet2> g_relative_jet(const WedgeSpec& w, const State& z) {
    const double x = z.x, y = z.y;
    const double s = x + w.M;
    if (!(s < 0.0)) return std::nullopt;
    const double q = w.xi * y / x;
    const double r = 1.0 - q * q;
    if (!(r > 0.0)) return std::nullopt;
    const double q2 = q * q;
    const double r2 = r * r;
    const double r4 = r2 * r2;
    const double x2 = x * x;

    // h'/h, h''/h and the rho derivatives over rho
    const double hx = -1.0 / (s * s);
    const double hxx = (2.0 * s + 1.0) / (s * s * s * s);
    const double rx = 2.0 * q2 / (x * r2);
    // d_y rho = -2 q^2 / (y (1-q^2)^2) rho, written through q / y = xi / x so
    // that it stays finite on the centreline y = 0.
    const double ry = -2.0 * q * (w.xi / x) / r2;
    const double rxx = 2.0 * q2 * (q2 * q2 + 4.0 * q2 - 3.0) / (x2 * r4);
    const double ryy = 2.0 * w.xi * w.xi * (3.0 * q2 * q2 - 1.0) / (x2 * r4);
    const double rxy = -4.0 * w.xi * q * (q2 * q2 + q2 - 1.0) / (x2 * r4);

    return Jet2{1.0, hx + rx, ry, hxx + 2.0 * hx * rx + rxx, hx * ry + rxy, ryy};
}

inline double g_value(const WedgeSpec& w, const State& z) {
    const double s = z.x + w.M;
    if (!(s < 0.0)) return 0.0;
    const double q = w.xi * z.y / z.x;
    const double r = 1.0 - q * q;
    if (!(r > 0.0)) return 0.0;
    return std::exp(1.0 / s - 1.0 / r);
}

inline Jet2 g_jet(const WedgeSpec& w, const State& z) {
    const auto rel = g_relative_jet(w, z);
    const double g = g_value(w, z);
    if (!rel || g == 0.0) return {};
    return *rel * g;
}

inline ScalarField g_field(const WedgeSpec& w) {
    return {[w](const State& z) { return g_jet(w, z); }, whole_plane(), "g"};
}

// The closed form of L h / h.
inline double lh_over_h(const ModelParams& p, const WedgeSpec& w, const State& z) {
    const double s = z.x + w.M;
    return (p.alpha1 * z.x * z.x - p.a1 * z.x - z.y * z.y) / (s * s) + p.kappa1 * (2.0 * s + 1.0) / (s * s * s * s);
}

struct InstabilityCertificate {
    WedgeSpec spec;
    double C_g = 0.0;
    std::size_t n_samples = 0;
    Band band;
    std::uint64_t seed = 0;
    double min_margin = 0.0;  // min of L g - C_g g
    std::size_t n_violations = 0;
    std::vector<State> violations;
    std::string reason;

    bool passes() const { return C_g > 0.0 && n_violations == 0 && min_margin >= 0.0; }
};

inline constexpr int kInstabilityGridLevels = 60;

struct InstabilitySample {
    State z;
    double g = 0.0;
    double ratio = 0.0;  // L g / g, +inf where g = 0
};

// L g / g comes from the relative jet, so its sign is reliable even where g
// itself is subnormal near the tip x = -M.
inline std::vector<InstabilitySample> instability_samples(const ModelParams& p, const WedgeSpec& w,
                                                          const Band& band, std::size_t n, std::uint64_t seed) {
    const Region wedge = wedge_region(w.xi, w.M);
    std::vector<InstabilitySample> out(n);
    parallel_for(n, [&](std::size_t k) {
        const State z = sample_point(wedge, seed, k, band);
        const auto rel = g_relative_jet(w, z);
        out[k].z = z;
        out[k].g = g_value(w, z);
        out[k].ratio = rel ? generator_apply(p, *rel, z) : std::numeric_limits<double>::infinity();
    });
    return out;
}

// Fit the largest C_g = 2^-k with L g >= C_g g at n wedge samples, then
// re-verify at n fresh samples from derive_seed(seed, 1). Outside the wedge
// g vanishes with all derivatives, so the margin there is exactly 0.
inline InstabilityCertificate verify_instability(const ModelParams& p, const WedgeSpec& w, std::size_t n,
                                                 std::uint64_t seed) {
    if (!(p.alpha1 > p.alpha2)) throw std::invalid_argument("instability needs alpha1 > alpha2 (explosive regime)");
    if (!in_xi_window(p, w.xi)) throw std::invalid_argument("xi^-2 outside ((alpha1-alpha2)/2, alpha1-alpha2)");
    InstabilityCertificate cert;
    cert.spec = w;
    cert.n_samples = n;
    cert.band = {w.M, 100.0 * w.M};
    cert.seed = derive_seed(seed, 1);
    if (n == 0) {
        cert.reason = "no samples requested";
        return cert;
    }
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& s : instability_samples(p, w, cert.band, n, seed)) {
        if (std::isnan(s.ratio)) {
            cert.reason = "non-finite L g / g at a sample";
            cert.min_margin = -std::numeric_limits<double>::infinity();
            return cert;
        }
        min_ratio = std::min(min_ratio, s.ratio);
    }
    for (int k = 0; k < kInstabilityGridLevels; ++k) {
        const double C = std::ldexp(1.0, -k);
        if (C <= min_ratio) {
            cert.C_g = C;
            break;
        }
    }
    if (cert.C_g == 0.0) {
        cert.reason = "no positive C with L g >= C g on the grid";
        cert.min_margin = -std::numeric_limits<double>::infinity();
        return cert;
    }
    cert.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : instability_samples(p, w, cert.band, n, cert.seed)) {
        const bool ok = s.ratio >= cert.C_g;
        if (!ok) {
            ++cert.n_violations;
            if (cert.violations.size() < kMaxStoredViolations) cert.violations.push_back(s.z);
        }
        const double m = s.g == 0.0 ? 0.0 : s.g * (s.ratio - cert.C_g);
        cert.min_margin = std::min(cert.min_margin, std::isnan(m) ? -std::numeric_limits<double>::infinity() : m);
    }
    return cert;
}

inline nlohmann::ordered_json to_json(const InstabilityCertificate& c, const ModelParams& p) {
    nlohmann::ordered_json j;
    j["kind"] = "instability";
    j["field"] = "g";
    j["region_label"] = "U_{xi,M}";
    j["params"] = params_json(p);
    j["wedge"] = {{"xi", round9(c.spec.xi)}, {"M", round9(c.spec.M)}, {"C_blow", round9(c.spec.C_blow)}};
    j["n_samples"] = c.n_samples;
    j["radius_band"] = {round9(c.band.lo), round9(c.band.hi)};
    j["seed"] = c.seed;
    j["C_est"] = round9(c.C_g);
    j["D_est"] = 0.0;
    j["min_margin"] = round9(c.min_margin);
    j["n_violations"] = c.n_violations;
    j["violations"] = states_json(c.violations);
    j["passes"] = c.passes();
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

}  // namespace driftcert
