#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcert/fields/model.hpp"

namespace driftcert {

enum class PathStatus { Alive, Exploded, StepFailure };

inline std::string to_string(PathStatus s) {
    switch (s) {
        case PathStatus::Alive: return "alive";
        case PathStatus::Exploded: return "exploded";
        case PathStatus::StepFailure: return "step_failure";
    }
    return "unknown";
}

// A path with its fate. status_time is the horizon (Alive), the first
// threshold crossing (Exploded) or the failing step's time (StepFailure).
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    PathStatus status = PathStatus::Alive;
    double status_time = 0.0;

    bool exploded() const { return status == PathStatus::Exploded; }
    const State& last() const { return states.back(); }
};

// Common integration settings. save_stride = k keeps every k-th step plus the
// first and last; 0 keeps only the endpoints.
struct PathOptions {
    double dt = 1e-4;
    double horizon = 1.0;
    double threshold = 1e6;
    std::size_t save_stride = 0;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
        if (!(threshold >= 1e3)) throw std::invalid_argument("explosion threshold must be >= 1e3");
    }
};

}  // namespace driftcert
