#pragma once

// Tamed Euler-Maruyama for the quadratic SDE. The drift increment
// dt b / (1 + dt |b|) has length below 1, so a single step cannot jump to
// infinity; explosion shows up as a first crossing of a large threshold.

#include <cmath>
#include <cstdint>
#include <utility>

#include "driftcert/core/random.hpp"
#include "driftcert/sim/trajectory.hpp"

namespace driftcert {

inline State sde_step(const ModelParams& p, const State& z, double dt, double xi1, double xi2) {
    const Vec2 b = drift(p, z);
    const double tame = dt / (1.0 + dt * b.norm());
    return {z.x + tame * b.x + std::sqrt(2.0 * p.kappa1 * dt) * xi1,
            z.y + tame * b.y + std::sqrt(2.0 * p.kappa2 * dt) * xi2};
}

// Runs the scheme with noise(step) -> (xi1, xi2).
template <class Noise>
Trajectory integrate_with(const ModelParams& p, const State& z0, const PathOptions& opt, Noise&& noise) {
    opt.validate();
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(z0);
    if (z0.norm() >= opt.threshold) {
        tr.status = PathStatus::Exploded;
        return tr;
    }
    const auto steps = static_cast<std::uint64_t>(std::ceil(opt.horizon / opt.dt - 1e-9));
    State z = z0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const auto [xi1, xi2] = noise(k);
        const State next = sde_step(p, z, opt.dt, xi1, xi2);
        const double t = static_cast<double>(k + 1) * opt.dt;
        if (!next.finite()) {
            tr.status = PathStatus::StepFailure;
            tr.status_time = t;
            if (tr.times.back() != static_cast<double>(k) * opt.dt) {
                tr.times.push_back(static_cast<double>(k) * opt.dt);
                tr.states.push_back(z);
            }
            return tr;
        }
        z = next;
        if (z.norm() >= opt.threshold) {
            tr.times.push_back(t);
            tr.states.push_back(z);
            tr.status = PathStatus::Exploded;
            tr.status_time = t;
            return tr;
        }
        const bool last = k + 1 == steps;
        if (last || (opt.save_stride > 0 && (k + 1) % opt.save_stride == 0)) {
            tr.times.push_back(t);
            tr.states.push_back(z);
        }
    }
    tr.status = PathStatus::Alive;
    tr.status_time = tr.times.back();
    return tr;
}

// Noise keyed by (seed, step index).
inline Trajectory integrate(const ModelParams& p, const State& z0, const PathOptions& opt, std::uint64_t seed) {
    const PathNoise noise(seed);
    return integrate_with(p, z0, opt, noise);
}

}  // namespace driftcert
