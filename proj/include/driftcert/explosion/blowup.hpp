#pragma once

// Deterministic blow-up time from the wedge against the bound 1/(C |x0|).

#include <cmath>
#include <stdexcept>

#include "driftcert/explosion/wedge.hpp"
#include "driftcert/sim/ode.hpp"

namespace driftcert {

struct BlowupCheck {
    State z0;
    double T_coarse = 0.0;  // crossing time at tolerance tol
    double T_fine = 0.0;    // at tol / 2
    double T_num = 0.0;     // Richardson extrapolation for a 4th-order method
    double bound = 0.0;     // 1 / (C_blow |x0|)
    bool exploded = false;

    bool holds(double slack = 0.05) const { return exploded && T_num <= bound * (1.0 + slack); }
};

inline BlowupCheck blowup_bound_check(const ModelParams& p, const WedgeSpec& w, const State& z0,
                                      double tol = 1e-3, double threshold = 1e6) {
    if (!w.contains(z0)) throw std::invalid_argument("blow-up start must lie in the wedge U_{xi,M}");
    if (!(w.C_blow > 0.0)) throw std::invalid_argument("wedge has no blow-up constant");
    BlowupCheck out;
    out.z0 = z0;
    out.bound = 1.0 / (w.C_blow * std::abs(z0.x));
    FlowOptions opt;
    opt.tol = tol;
    opt.horizon = 10.0 * out.bound;
    opt.threshold = threshold;
    const Trajectory a = deterministic_flow(p, z0, opt);
    opt.tol = 0.5 * tol;
    const Trajectory b = deterministic_flow(p, z0, opt);
    out.exploded = a.exploded() && b.exploded();
    if (!out.exploded) return out;
    out.T_coarse = a.status_time;
    out.T_fine = b.status_time;
    out.T_num = out.T_fine + (out.T_fine - out.T_coarse) / 15.0;
    return out;
}

}  // namespace driftcert
