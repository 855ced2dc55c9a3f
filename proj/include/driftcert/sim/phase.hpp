#pragma once

// Explosion fractions over a grid of (alpha1, alpha2) with the remaining
// coefficients fixed.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "driftcert/sim/ensemble.hpp"

namespace driftcert {

struct PhaseGrid {
    std::vector<double> alpha1;
    std::vector<double> alpha2;

    static PhaseGrid uniform(double lo, double hi, std::size_t n) {
        if (n < 1 || !(hi >= lo)) throw std::invalid_argument("phase grid needs n >= 1 and hi >= lo");
        PhaseGrid g;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
            g.alpha1.push_back(v);
            g.alpha2.push_back(v);
        }
        return g;
    }
};

struct PhaseCell {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    State z0;
    EnsembleStats stats;
};

using StartPolicy = std::function<State(const ModelParams&)>;

// Cells in row-major order (alpha1 outer, alpha2 inner); cell k runs its
// ensemble with master seed derive_seed(master_seed, k). Paths of all cells
// are scheduled together so the work spreads evenly over the workers.
inline std::vector<PhaseCell> phase_diagram(const PhaseGrid& grid, const ModelParams& base, const StartPolicy& start,
                                            std::size_t paths_per_cell, const PathOptions& opt,
                                            std::uint64_t master_seed) {
    if (paths_per_cell == 0) throw std::invalid_argument("phase diagram needs >= 1 path per cell");
    opt.validate();
    std::vector<PhaseCell> cells;
    std::vector<ModelParams> params;
    for (double a1 : grid.alpha1)
        for (double a2 : grid.alpha2) {
            const ModelParams p = base.with_alpha(a1, a2);
            params.push_back(p);
            cells.push_back({a1, a2, start(p), {}});
        }
    const std::size_t total = cells.size() * paths_per_cell;
    std::vector<Trajectory> paths(total);
    PathOptions o = opt;
    o.save_stride = 0;
    parallel_for(total, [&](std::size_t k) {
        const std::size_t c = k / paths_per_cell;
        const std::size_t j = k % paths_per_cell;
        paths[k] = integrate(params[c], cells[c].z0, o, derive_seed(derive_seed(master_seed, c), j));
    });
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto first = paths.begin() + static_cast<std::ptrdiff_t>(c * paths_per_cell);
        cells[c].stats = summarize({first, first + static_cast<std::ptrdiff_t>(paths_per_cell)});
    }
    return cells;
}

}  // namespace driftcert
