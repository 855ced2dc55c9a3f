#pragma once

// Start points and path settings for explosion ensembles.

#include <algorithm>

#include "driftcert/explosion/wedge.hpp"
#include "driftcert/sim/trajectory.hpp"

namespace driftcert {

// Deep on the wedge centreline.
inline State wedge_start(const WedgeSpec& w) { return {-std::max(10.0, 4.0 * w.M), 0.0}; }

// Wedge start when alpha1 > alpha2, the stable equilibrium at the origin
// otherwise. A start on the negative x-axis is avoided in the ergodic regime:
// there the path first runs out along the axis and only turns back once y^2
// catches up with alpha1 x^2, far beyond any practical threshold when
// alpha2 / alpha1 is close to 1.
inline State wedge_adapted_start(const ModelParams& p) {
    if (p.alpha1 > p.alpha2) return wedge_start(choose_wedge(p));
    return {0.0, 0.0};
}

// The tamed increment is shorter than 1, so crossing a threshold T takes at
// least about T steps once |b| dt >> 1. Explosion ensembles therefore use a
// threshold of 1e4: inside the wedge at that radius the noiseless flow blows
// up within 1 / (C 1e4) and the noise is negligible against the drift.
inline PathOptions explosion_ensemble_options() { return {1e-3, 20.0, 1e4, 0}; }

}  // namespace driftcert
