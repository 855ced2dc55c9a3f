#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "driftcert/core/parallel.hpp"
#include "driftcert/core/random.hpp"
#include "driftcert/fields/jet.hpp"
#include "driftcert/fields/model.hpp"

namespace driftcert {

// Radii [lo, hi] of an annular sampling band.
struct Band {
    double lo = 1.0;
    double hi = 100.0;

    bool contains(const State& z) const {
        const double r = z.norm();
        return r >= lo && r <= hi;
    }
};

// A subset of the plane with a membership predicate and a sampler for its
// intersection with a radius band. `draw` makes one attempt from a stream
// and may return nullopt (rejection); `sample` retries until success.
struct Region {
    std::function<bool(const State&)> contains;
    std::string describe;
    std::function<std::optional<State>(Stream&, const Band&)> draw;

    bool operator()(const State& z) const { return contains(z); }
};

inline constexpr int kMaxSampleAttempts = 100000;

// Point k is drawn from its own stream (seed, k), so the result does not
// depend on the worker count.
inline State sample_point(const Region& region, std::uint64_t seed, std::uint64_t k, const Band& band) {
    Stream stream(seed, k);
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        if (auto z = region.draw(stream, band)) {
            if (band.contains(*z) && region.contains(*z)) return *z;
        }
    }
    throw std::runtime_error("sampler for region '" + region.describe + "' failed to produce a point");
}

inline std::vector<State> sample_region(const Region& region, std::uint64_t seed, std::size_t count,
                                        const Band& band) {
    std::vector<State> out(count);
    parallel_for(count, [&](std::size_t k) { out[k] = sample_point(region, seed, k, band); });
    return out;
}

// Uniform-angle, log-uniform-radius annulus sampler with rejection.
inline std::function<std::optional<State>(Stream&, const Band&)> annulus_draw(double theta_lo = 0.0,
                                                                            double theta_hi = 6.283185307179586) {
    return [theta_lo, theta_hi](Stream& s, const Band& band) -> std::optional<State> {
        const double r = s.log_uniform(band.lo, band.hi);
        const double t = s.uniform(theta_lo, theta_hi);
        return State{r * std::cos(t), r * std::sin(t)};
    };
}

inline Region whole_plane() {
    return {[](const State&) { return true; }, "R^2", annulus_draw()};
}

// A scalar function known through its second-order jets on `domain`.
struct ScalarField {
    std::function<Jet2(const State&)> jet_at;
    Region domain;
    std::string label;

    Jet2 jet(const State& z) const { return jet_at(z); }
    double value(const State& z) const { return jet_at(z).v; }
};

inline double generator_apply(const ModelParams& p, const ScalarField& f, const State& z) {
    return generator_apply(p, f.jet(z), z);
}

}  // namespace driftcert
