#pragma once

// Noiseless flow by classical RK4 with the step tied to the drift size,
// h = min(h_max, tol max(1, |z|) / |b(z)|), so each step moves the state by
// about tol relative to its size. Blow-up is the first crossing of the
// threshold, located by interpolating 1/|z| linearly across the step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "driftcert/sim/trajectory.hpp"

namespace driftcert {

struct FlowOptions {
    double tol = 1e-3;
    double h_max = 1e-2;
    double horizon = 10.0;
    double threshold = 1e6;
    std::size_t save_stride = 0;
    std::size_t max_steps = 50'000'000;
};

inline State rk4_step(const ModelParams& p, const State& z, double h) {
    auto f = [&p](const State& s) { return drift(p, s); };
    const Vec2 k1 = f(z);
    const Vec2 k2 = f({z.x + 0.5 * h * k1.x, z.y + 0.5 * h * k1.y});
    const Vec2 k3 = f({z.x + 0.5 * h * k2.x, z.y + 0.5 * h * k2.y});
    const Vec2 k4 = f({z.x + h * k3.x, z.y + h * k3.y});
    return {z.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            z.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

inline Trajectory deterministic_flow(const ModelParams& p, const State& z0, const FlowOptions& opt = {}) {
    if (!(opt.tol > 0.0) || !(opt.h_max > 0.0) || !(opt.horizon > 0.0) || !(opt.threshold > 0.0))
        throw std::invalid_argument("flow options must be positive");
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(z0);
    State z = z0;
    double t = 0.0;
    if (z.norm() >= opt.threshold) {
        tr.status = PathStatus::Exploded;
        return tr;
    }
    for (std::size_t k = 0; k < opt.max_steps; ++k) {
        const double speed = drift(p, z).norm();
        double h = opt.h_max;
        if (speed > 0.0) h = std::min(h, opt.tol * std::max(1.0, z.norm()) / speed);
        h = std::min(h, opt.horizon - t);
        const State next = rk4_step(p, z, h);
        if (!next.finite()) {
            tr.status = PathStatus::StepFailure;
            tr.status_time = t + h;
            return tr;
        }
        const double r0 = z.norm();
        const double r1 = next.norm();
        if (r1 >= opt.threshold) {
            const double u0 = 1.0 / r0, u1 = 1.0 / r1, ut = 1.0 / opt.threshold;
            tr.times.push_back(t + h);
            tr.states.push_back(next);
            tr.status = PathStatus::Exploded;
            tr.status_time = t + h * (u0 - ut) / (u0 - u1);
            return tr;
        }
        z = next;
        t += h;
        const bool done = t >= opt.horizon;
        if (done || (opt.save_stride > 0 && (k + 1) % opt.save_stride == 0)) {
            tr.times.push_back(t);
            tr.states.push_back(z);
        }
        if (done) {
            tr.status = PathStatus::Alive;
            tr.status_time = t;
            return tr;
        }
    }
    tr.status = PathStatus::StepFailure;
    tr.status_time = t;
    return tr;
}

}  // namespace driftcert
