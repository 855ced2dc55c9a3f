#pragma once

// The whole Lyapunov construction for one model: covering parameters, the
// five piece certificates on V_1..V_5, the four patch certificates, the glued
// Phi on the annulus and the rescaling to the model's own kappa2.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftcert/lyapunov/cover.hpp"
#include "driftcert/lyapunov/scaling.hpp"

namespace driftcert {

struct NamedCertificate {
    std::string name;
    CertifyResult result;
};

struct LyapunovReport {
    ModelParams model;      // as requested
    ModelParams certified;  // kappa2 replaced by kappa2_star, a and kappa1 rescaled
    CoverParams cover;
    ScalingMap scaling;
    double R = 0.0;
    std::vector<NamedCertificate> pieces;   // phi_i on V_i
    std::vector<NamedCertificate> patches;  // phi_{i,i+1} on U_i cap U_{i+1}
    NamedCertificate glued;                 // Phi on the annulus
    double phi1_C_floor = 0.0;              // kappa2_star / 80
    double scaling_residual = 0.0;

    bool phi1_rate_ok() const { return !pieces.empty() && pieces[0].result.fit.C >= phi1_C_floor; }

    // The six certificates of the construction and the rate floor for phi_1.
    bool passes() const {
        for (const auto& c : pieces)
            if (!c.result.passes()) return false;
        return glued.result.passes() && phi1_rate_ok();
    }
};

inline constexpr std::size_t kScalingCheckPoints = 1000;

// Certificates are computed for the rescaled model whose kappa2 equals
// kappa2_star; Phi(c z) then serves the requested model. Seeds: piece i uses
// derive_seed(seed, i), patch i derive_seed(seed, 10 + i), Phi
// derive_seed(seed, 20).
inline LyapunovReport lyapunov_pipeline(const ModelParams& p, std::size_t n, std::uint64_t seed) {
    LyapunovReport r;
    r.model = p;
    // The covering depends on a, and a is rescaled together with kappa2, so
    // kappa2_star is the fixed point of "select on the rescaled model".
    double k2 = cover_params(p).kappa2_star;
    for (int it = 0;; ++it) {
        if (it == 8) throw std::runtime_error("kappa2_star selection does not settle under rescaling");
        const ScalingMap m = scaling_map(p, k2);
        const CoverParams c = cover_params(m.source);
        if (c.kappa2_star == k2) {
            r.scaling = m;
            r.cover = c;
            break;
        }
        k2 = c.kappa2_star;
    }
    r.certified = r.scaling.source;
    r.phi1_C_floor = r.cover.kappa2_star / 80.0;
    const ModelParams& q = r.certified;
    const GlobalPhi phi = global_phi(q, r.cover);
    r.R = phi.R();
    const Band band{r.R, 100.0 * r.R};
    for (int i = 1; i <= 5; ++i) {
        const LyapunovPiece piece = make_piece(i, q, r.cover);
        const Region v = strong_subcover(i, r.cover);
        r.pieces.push_back({piece.phi.label + " on " + v.describe,
                            certify_drift(q, piece.phi, v, band, n, derive_seed(seed, i))});
    }
    for (int i = 1; i <= 4; ++i) {
        const ScalarField f = patch(i, q, r.cover);
        r.patches.push_back(
            {f.label + " on overlap", certify_drift(q, f, overlap_region(i, r.cover), band, n, derive_seed(seed, 10 + i))});
    }
    r.glued = {"Phi on annulus", certify_drift(q, phi.field, stratified_plane(r.cover), band, n, derive_seed(seed, 20))};
    r.scaling_residual = scaling_identity_check(p, phi.field, r.cover.kappa2_star, kScalingCheckPoints, derive_seed(seed, 30));
    return r;
}

inline nlohmann::ordered_json to_json(const CertifyResult& r, const ModelParams& p) {
    nlohmann::ordered_json j = to_json(r.cert, p);
    j["fit_feasible"] = r.fit.feasible;
    if (!r.fit.feasible) j["fit_reason"] = r.fit.reason;
    j["passes"] = r.passes();
    return j;
}

inline nlohmann::ordered_json to_json(const CoverParams& c) {
    return {{"kappa2_star", round9(c.kappa2_star)}, {"sigma", round9(c.sigma)}, {"delta", round9(c.delta)},
            {"beta", round9(c.beta)},               {"gamma", round9(c.gamma)}, {"eta", round9(c.eta)},
            {"D", round9(c.Dcap)},                  {"N", round9(c.Ncap)},      {"C1", round9(c.C1)},
            {"C2", round9(c.C2)},                   {"C3", round9(c.C3)},       {"C4", round9(c.C4)},
            {"C5", round9(c.C5)}};
}

inline nlohmann::ordered_json to_json(const LyapunovReport& r) {
    nlohmann::ordered_json j;
    j["params"] = params_json(r.model);
    j["certified_params"] = params_json(r.certified);
    j["cover"] = to_json(r.cover);
    j["appendix_violations"] = appendix_violations(r.certified, r.cover);
    j["scaling"] = {{"c", round9(r.scaling.c)}, {"max_residual", round9(r.scaling_residual)}};
    j["R"] = round9(r.R);
    auto list = [&](const std::vector<NamedCertificate>& v) {
        auto a = nlohmann::ordered_json::array();
        for (const auto& c : v) {
            auto e = to_json(c.result, r.certified);
            e["name"] = c.name;
            a.push_back(e);
        }
        return a;
    };
    j["pieces"] = list(r.pieces);
    j["patches"] = list(r.patches);
    j["glued"] = to_json(r.glued.result, r.certified);
    j["glued"]["name"] = r.glued.name;
    j["glued"]["patch45_crossover_log10_y"] = round9(patch45_crossover_log10(r.cover));
    j["phi1_rate"] = {{"C", round9(r.pieces.at(0).result.fit.C)},
                      {"floor", round9(r.phi1_C_floor)},
                      {"ok", r.phi1_rate_ok()}};
    j["passes"] = r.passes();
    return j;
}

}  // namespace driftcert
