#pragma once

// Selection of kappa2_star and the full set of covering parameters.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "driftcert/lyapunov/appendix.hpp"
#include "driftcert/lyapunov/certificate.hpp"
#include "driftcert/lyapunov/patch.hpp"

namespace driftcert {

inline constexpr std::size_t kPatchCheckSamples = 10000;
inline constexpr std::uint64_t kPatchCheckSeed = 0x9A7C41ull;
inline constexpr int kMaxKappaHalvings = 40;

// Fit-then-verify of the patched function on the overlap U_i cap U_{i+1},
// band [R, 100 R], with kappa2 replaced by c.kappa2_star.
inline CertifyResult verify_patch(int i, const ModelParams& p, const CoverParams& c,
                                  std::size_t n = kPatchCheckSamples, std::uint64_t seed = kPatchCheckSeed) {
    const ModelParams q = p.with_kappa(p.kappa1, c.kappa2_star);
    const double R = glue_radii(c).R;
    return certify_drift(q, patch(i, q, c), overlap_region(i, c), {R, 100.0 * R}, n, seed);
}

// kappa2 = 1, 1/2, 1/4, ... until the closed-form conditions hold and the
// first patch passes its sampled margin check.
inline CoverParams cover_params(const ModelParams& p) {
    if (!(p.alpha2 > p.alpha1))
        throw std::invalid_argument("no Lyapunov covering for alpha2 <= alpha1 (explosive regime)");
    double k2 = 1.0;
    for (int h = 0; h <= kMaxKappaHalvings; ++h, k2 *= 0.5) {
        const CoverParams c = appendix_params(p, k2);
        if (!closed_form_conditions(p, c)) continue;
        if (verify_patch(1, p, c).passes()) return c;
    }
    throw std::runtime_error("no admissible kappa2_star found down to 2^-40");
}

}  // namespace driftcert
