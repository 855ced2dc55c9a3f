#pragma once

// Sampled drift certificates: evidence that L phi <= -C phi + D on a region
// intersected with a radius band.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftcert/core/format.hpp"
#include "driftcert/fields/scalar_field.hpp"

namespace driftcert {

inline constexpr int kDriftGridLevels = 60;  // C in {2^0, 2^-1, ..., 2^-59}
inline constexpr std::size_t kMaxStoredViolations = 100;

struct DriftSample {
    State z;
    double phi = 0.0;
    double Lphi = 0.0;
};

inline std::vector<DriftSample> drift_samples(const ModelParams& p, const ScalarField& f, const Region& region,
                                              const Band& band, std::size_t n, std::uint64_t seed) {
    std::vector<DriftSample> out(n);
    parallel_for(n, [&](std::size_t k) {
        const State z = sample_point(region, seed, k, band);
        const Jet2 j = f.jet(z);
        out[k] = {z, j.v, generator_apply(p, j, z)};
    });
    return out;
}

struct FitResult {
    bool feasible = false;
    double C = 0.0;
    double D = 0.0;
    double sample_max = 0.0;  // max over samples of L phi + C phi
    std::string reason;
};

// Largest C on the grid for which L phi + C phi does not grow toward the
// outer edge of the band: its maximum over the outermost decile (by radius)
// must not exceed max(0, its maximum over the rest). D is the sample
// supremum at that C, padded by half its magnitude for unseen points.
inline FitResult fit_drift_constants(const ModelParams& p, const ScalarField& f, const Region& region,
                                     const Band& band, std::size_t n, std::uint64_t seed) {
    FitResult out;
    if (n == 0) {
        out.reason = "no samples requested";
        return out;
    }
    std::vector<DriftSample> samples = drift_samples(p, f, region, band, n, seed);
    for (const auto& s : samples) {
        if (!std::isfinite(s.phi) || !std::isfinite(s.Lphi)) {
            out.reason = "non-finite value of phi or L phi at a sample";
            return out;
        }
    }
    std::vector<double> radii(n);
    for (std::size_t k = 0; k < n; ++k) radii[k] = samples[k].z.norm();
    std::vector<double> sorted = radii;
    const std::size_t cut_index = n - std::max<std::size_t>(1, n / 10);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut_index), sorted.end());
    const double r_cut = sorted[cut_index];

    for (int level = 0; level < kDriftGridLevels; ++level) {
        const double C = std::ldexp(1.0, -level);
        double inner = -std::numeric_limits<double>::infinity();
        double outer = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double m = samples[k].Lphi + C * samples[k].phi;
            if (radii[k] >= r_cut && n > 1)
                outer = std::max(outer, m);
            else
                inner = std::max(inner, m);
        }
        const double inner_ref = std::max(0.0, inner);
        if (outer <= inner_ref) {
            const double m = std::max(inner, outer);
            out.feasible = true;
            out.C = C;
            out.sample_max = m;
            out.D = std::max(0.0, m + 0.5 * std::abs(m));
            return out;
        }
    }
    out.reason = "L phi + C phi grows toward the outer band edge for every C on the grid";
    return out;
}

struct DriftCertificate {
    std::string region_label;
    std::string field_label;
    std::size_t n_samples = 0;
    Band band;
    std::uint64_t seed = 0;
    double C_est = 0.0;
    double D_est = 0.0;
    double min_margin = 0.0;
    std::size_t n_violations = 0;
    std::vector<State> violations;  // first kMaxStoredViolations

    bool passes() const { return n_violations == 0 && min_margin >= 0.0; }
};

inline DriftCertificate verify_drift(const ModelParams& p, const ScalarField& f, const Region& region,
                                     const Band& band, std::size_t n, double C, double D, std::uint64_t seed) {
    if (!(C > 0.0)) throw std::invalid_argument("verify_drift needs C > 0");
    DriftCertificate cert;
    cert.region_label = region.describe;
    cert.field_label = f.label;
    cert.n_samples = n;
    cert.band = band;
    cert.seed = seed;
    cert.C_est = C;
    cert.D_est = D;
    const std::vector<DriftSample> samples = drift_samples(p, f, region, band, n, seed);
    cert.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double margin = -C * s.phi + D - s.Lphi;
        if (!(margin >= 0.0)) {
            ++cert.n_violations;
            if (cert.violations.size() < kMaxStoredViolations) cert.violations.push_back(s.z);
        }
        if (std::isnan(margin))
            cert.min_margin = -std::numeric_limits<double>::infinity();
        else
            cert.min_margin = std::min(cert.min_margin, margin);
    }
    if (n == 0) cert.min_margin = 0.0;
    return cert;
}

// Fit on `seed`, verify on fresh points from derive_seed(seed, 1).
struct CertifyResult {
    FitResult fit;
    DriftCertificate cert;
    bool passes() const { return fit.feasible && cert.passes(); }
};

inline CertifyResult certify_drift(const ModelParams& p, const ScalarField& f, const Region& region,
                                   const Band& band, std::size_t n, std::uint64_t seed) {
    CertifyResult r;
    r.fit = fit_drift_constants(p, f, region, band, n, seed);
    if (!r.fit.feasible) {
        r.cert.region_label = region.describe;
        r.cert.field_label = f.label;
        r.cert.n_samples = n;
        r.cert.band = band;
        r.cert.seed = derive_seed(seed, 1);
        r.cert.min_margin = -std::numeric_limits<double>::infinity();
        return r;
    }
    r.cert = verify_drift(p, f, region, band, n, r.fit.C, r.fit.D, derive_seed(seed, 1));
    return r;
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    return {{"a1", round9(p.a1)},         {"a2", round9(p.a2)},         {"alpha1", round9(p.alpha1)},
            {"alpha2", round9(p.alpha2)}, {"kappa1", round9(p.kappa1)}, {"kappa2", round9(p.kappa2)}};
}

inline nlohmann::ordered_json states_json(const std::vector<State>& zs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& z : zs) arr.push_back({round9(z.x), round9(z.y)});
    return arr;
}

inline nlohmann::ordered_json to_json(const DriftCertificate& c, const ModelParams& p) {
    nlohmann::ordered_json j;
    j["kind"] = "drift";
    j["field"] = c.field_label;
    j["region_label"] = c.region_label;
    j["params"] = params_json(p);
    j["n_samples"] = c.n_samples;
    j["radius_band"] = {round9(c.band.lo), round9(c.band.hi)};
    j["seed"] = c.seed;
    j["C_est"] = round9(c.C_est);
    j["D_est"] = round9(c.D_est);
    j["min_margin"] = round9(c.min_margin);
    j["n_violations"] = c.n_violations;
    j["violations"] = states_json(c.violations);
    j["passes"] = c.passes();
    return j;
}

}  // namespace driftcert
