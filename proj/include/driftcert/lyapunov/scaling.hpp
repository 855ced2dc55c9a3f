#pragma once

// Noise rescaling: if Psi works for (a, alpha, kappa) then Phi(z) = Psi(c z)
// works for (b, alpha, iota) with c = (kappa2 / iota2)^(1/3), a = c b and
// kappa = (c^3 iota1, kappa2), because L^iota_b Phi(z) = (1/c)(L^kappa_a Psi)(c z).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "driftcert/fields/scalar_field.hpp"

namespace driftcert {

struct ScalingMap {
    double c = 1.0;
    ModelParams source;  // (a, alpha, kappa) on which Psi is known
};

inline ScalingMap scaling_map(const ModelParams& target, double kappa2_ref) {
    if (!(kappa2_ref > 0.0)) throw std::invalid_argument("reference kappa2 must be > 0");
    const double c = std::cbrt(kappa2_ref / target.kappa2);
    return {c, {c * target.a1, c * target.a2, target.alpha1, target.alpha2, c * c * c * target.kappa1, kappa2_ref}};
}

// Phi(z) = Psi(c z) with jets by the chain rule.
inline ScalarField rescaled_field(const ScalarField& psi, double c) {
    Region dom = psi.domain;
    Region pulled{[d = psi.domain, c](const State& z) { return d.contains({c * z.x, c * z.y}); },
                  psi.domain.describe + "/c", [d = psi.domain, c](Stream& s, const Band& b) -> std::optional<State> {
                      auto w = d.draw(s, {c * b.lo, c * b.hi});
                      if (!w) return std::nullopt;
                      return State{w->x / c, w->y / c};
                  }};
    return {[psi, c](const State& z) {
                const Jet2 j = psi.jet({c * z.x, c * z.y});
                return Jet2{j.v, c * j.dx, c * j.dy, c * c * j.dxx, c * c * j.dxy, c * c * j.dyy};
            },
            pulled, psi.label + "(c z)"};
}

// Max over n points with |z| <= radius of |L^iota_b Phi(z) - (1/c)(L^kappa_a Psi)(c z)|.
inline double scaling_identity_check(const ModelParams& target, const ScalarField& psi, double kappa2_ref,
                                     std::size_t n, std::uint64_t seed, double radius = 10.0) {
    const ScalingMap m = scaling_map(target, kappa2_ref);
    const ScalarField phi = rescaled_field(psi, m.c);
    std::vector<double> res(n);
    parallel_for(n, [&](std::size_t k) {
        Stream s(seed, k);
        const double r = radius * std::sqrt(s.uniform());
        const double t = s.uniform(0.0, 2.0 * std::numbers::pi);
        const State z{r * std::cos(t), r * std::sin(t)};
        const State cz{m.c * z.x, m.c * z.y};
        const double lhs = generator_apply(target, phi.jet(z), z);
        const double rhs = generator_apply(m.source, psi.jet(cz), cz) / m.c;
        res[k] = std::abs(lhs - rhs);
    });
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

}  // namespace driftcert
