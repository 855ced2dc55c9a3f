#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "driftcert/core/parallel.hpp"
#include "driftcert/sim/sde.hpp"

namespace driftcert {

// 95% Wilson score interval for k successes in n trials.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilson interval needs n >= 1");
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    const double lo = k == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
    const double hi = k == n ? 1.0 : std::clamp(centre + half, p, 1.0);
    return {lo, hi};
}

struct EnsembleStats {
    std::size_t n = 0;
    std::size_t n_exploded = 0;
    std::size_t n_failed = 0;  // StepFailure paths, counted as not exploded
    double explosion_fraction = 0.0;
    std::pair<double, double> wilson_ci95{0.0, 1.0};
    std::optional<double> mean_t_exp;
};

inline EnsembleStats summarize(const std::vector<Trajectory>& paths) {
    if (paths.empty()) throw std::invalid_argument("ensemble needs at least one path");
    EnsembleStats s;
    s.n = paths.size();
    double t_sum = 0.0;
    for (const auto& tr : paths) {
        if (tr.status == PathStatus::Exploded) {
            ++s.n_exploded;
            t_sum += tr.status_time;
        } else if (tr.status == PathStatus::StepFailure) {
            ++s.n_failed;
        }
    }
    s.explosion_fraction = static_cast<double>(s.n_exploded) / static_cast<double>(s.n);
    s.wilson_ci95 = wilson_interval(s.n_exploded, s.n);
    if (s.n_exploded > 0) s.mean_t_exp = t_sum / static_cast<double>(s.n_exploded);
    return s;
}

// Path k uses seed derive_seed(master_seed, k); paths keep endpoints only.
inline std::vector<Trajectory> ensemble_paths(const ModelParams& p, const State& z0, std::size_t n,
                                              PathOptions opt, std::uint64_t master_seed) {
    if (n == 0) throw std::invalid_argument("ensemble needs n >= 1");
    opt.validate();
    opt.save_stride = 0;
    std::vector<Trajectory> out(n);
    parallel_for(n, [&](std::size_t k) { out[k] = integrate(p, z0, opt, derive_seed(master_seed, k)); });
    return out;
}

inline EnsembleStats ensemble(const ModelParams& p, const State& z0, std::size_t n, const PathOptions& opt,
                              std::uint64_t master_seed) {
    return summarize(ensemble_paths(p, z0, n, opt, master_seed));
}

}  // namespace driftcert
