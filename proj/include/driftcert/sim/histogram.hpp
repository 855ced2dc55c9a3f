#pragma once

// Occupation histograms on a box with uniform bins, total-variation distance
// between histograms on common bins, and the time decay of that distance.
//
// mass[j * nx + i] is the fraction of samples in x bin i and y bin j
// (row-major, rows are y bins). Samples outside the box go to `outside`.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcert/core/parallel.hpp"
#include "driftcert/sim/sde.hpp"

namespace driftcert {

struct Box {
    double x_lo = -5.0, x_hi = 5.0;
    double y_lo = -5.0, y_hi = 5.0;
};

struct Histogram2D {
    std::vector<double> x_edges;
    std::vector<double> y_edges;
    std::vector<double> mass;
    double outside = 0.0;

    std::size_t nx() const { return x_edges.size() - 1; }
    std::size_t ny() const { return y_edges.size() - 1; }
    double at(std::size_t i, std::size_t j) const { return mass[j * nx() + i]; }
    double total() const {
        double s = outside;
        for (double m : mass) s += m;
        return s;
    }
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins >= 1 and hi > lo");
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
        e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    return e;
}

// Integer counts, normalized once at the end so mass + outside sums to 1
// within rounding.
class HistogramCounter {
public:
    HistogramCounter(const Box& box, std::size_t nx, std::size_t ny)
        : box_(box), nx_(nx), ny_(ny), counts_(nx * ny, 0) {
        if (nx == 0 || ny == 0 || !(box.x_hi > box.x_lo) || !(box.y_hi > box.y_lo))
            throw std::invalid_argument("histogram needs a nonempty box and bins >= 1");
    }

    void add(const State& z) {
        ++total_;
        const double fx = (z.x - box_.x_lo) / (box_.x_hi - box_.x_lo);
        const double fy = (z.y - box_.y_lo) / (box_.y_hi - box_.y_lo);
        if (!(fx >= 0.0 && fx < 1.0 && fy >= 0.0 && fy < 1.0)) {
            ++outside_;
            return;
        }
        const auto i = std::min(nx_ - 1, static_cast<std::size_t>(fx * static_cast<double>(nx_)));
        const auto j = std::min(ny_ - 1, static_cast<std::size_t>(fy * static_cast<double>(ny_)));
        ++counts_[j * nx_ + i];
    }

    void add_outside() {
        ++total_;
        ++outside_;
    }

    std::uint64_t total() const { return total_; }

    Histogram2D finish() const {
        if (total_ == 0) throw std::runtime_error("histogram has no samples");
        Histogram2D h;
        h.x_edges = uniform_edges(box_.x_lo, box_.x_hi, nx_);
        h.y_edges = uniform_edges(box_.y_lo, box_.y_hi, ny_);
        const double n = static_cast<double>(total_);
        h.mass.resize(counts_.size());
        for (std::size_t k = 0; k < counts_.size(); ++k) h.mass[k] = static_cast<double>(counts_[k]) / n;
        h.outside = static_cast<double>(outside_) / n;
        return h;
    }

private:
    Box box_;
    std::size_t nx_, ny_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t outside_ = 0;
    std::uint64_t total_ = 0;
};

// Merges f x f blocks of bins; the bin counts must be divisible by f.
inline Histogram2D coarsen(const Histogram2D& h, std::size_t f) {
    if (f == 0 || h.nx() % f != 0 || h.ny() % f != 0)
        throw std::invalid_argument("coarsening factor must divide both bin counts");
    Histogram2D out;
    const std::size_t nx = h.nx() / f, ny = h.ny() / f;
    out.x_edges = uniform_edges(h.x_edges.front(), h.x_edges.back(), nx);
    out.y_edges = uniform_edges(h.y_edges.front(), h.y_edges.back(), ny);
    out.mass.assign(nx * ny, 0.0);
    for (std::size_t j = 0; j < h.ny(); ++j)
        for (std::size_t i = 0; i < h.nx(); ++i) out.mass[(j / f) * nx + i / f] += h.at(i, j);
    out.outside = h.outside;
    return out;
}

class PathExploded : public std::runtime_error {
public:
    PathExploded(PathStatus status, double t)
        : std::runtime_error("path " + to_string(status) + " at t = " + std::to_string(t)), status_(status), t_(t) {}
    PathStatus status() const { return status_; }
    double time() const { return t_; }

private:
    PathStatus status_;
    double t_;
};

struct HistogramSpec {
    Box box;
    std::size_t bins_x = 40;
    std::size_t bins_y = 40;
};

// Occupation measure of one path on (burn_in, horizon], one sample per step.
// Throws PathExploded if the path leaves through the threshold or fails.
inline Histogram2D invariant_histogram(const ModelParams& p, const State& z0, double burn_in, double horizon,
                                       double dt, const HistogramSpec& spec, std::uint64_t seed,
                                       double threshold = 1e6) {
    if (!(burn_in >= 0.0 && burn_in < horizon)) throw std::invalid_argument("need 0 <= burn_in < horizon");
    PathOptions opt{dt, horizon, threshold, 0};
    opt.validate();
    HistogramCounter counter(spec.box, spec.bins_x, spec.bins_y);
    const PathNoise noise(seed);
    const auto steps = static_cast<std::uint64_t>(std::ceil(horizon / dt - 1e-9));
    const auto first = static_cast<std::uint64_t>(std::ceil(burn_in / dt - 1e-9));
    State z = z0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const auto [xi1, xi2] = noise(k);
        z = sde_step(p, z, dt, xi1, xi2);
        const double t = static_cast<double>(k + 1) * dt;
        if (!z.finite()) throw PathExploded(PathStatus::StepFailure, t);
        if (z.norm() >= threshold) throw PathExploded(PathStatus::Exploded, t);
        if (k + 1 > first) counter.add(z);
    }
    return counter.finish();
}

// Law of Z_t from z0 estimated by n paths; exploded paths count as outside.
inline Histogram2D ensemble_histogram(const ModelParams& p, const State& z0, std::size_t n, double t, double dt,
                                      const HistogramSpec& spec, std::uint64_t master_seed,
                                      double threshold = 1e6) {
    if (n == 0) throw std::invalid_argument("ensemble histogram needs n >= 1");
    std::vector<Trajectory> paths(n);
    const PathOptions opt{dt, t, threshold, 0};
    parallel_for(n, [&](std::size_t k) { paths[k] = integrate(p, z0, opt, derive_seed(master_seed, k)); });
    HistogramCounter counter(spec.box, spec.bins_x, spec.bins_y);
    for (const auto& tr : paths) {
        if (tr.status == PathStatus::Alive)
            counter.add(tr.last());
        else
            counter.add_outside();
    }
    return counter.finish();
}

inline double tv_distance(const Histogram2D& a, const Histogram2D& b) {
    if (a.x_edges != b.x_edges || a.y_edges != b.y_edges)
        throw std::invalid_argument("tv_distance needs identical bin edges");
    double s = std::abs(a.outside - b.outside);
    for (std::size_t k = 0; k < a.mass.size(); ++k) s += std::abs(a.mass[k] - b.mass[k]);
    return std::min(1.0, 0.5 * s);
}

struct TvDecay {
    std::vector<double> times;
    std::vector<double> distances;
    double slope = 0.0;  // least-squares slope of log(distance) against t
};

inline double log_linear_slope(const std::vector<double>& t, const std::vector<double>& d) {
    if (t.size() != d.size() || t.size() < 2) throw std::invalid_argument("slope needs >= 2 paired points");
    const double n = static_cast<double>(t.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double l = std::log(std::max(d[k], 1e-300));
        st += t[k];
        sl += l;
        stt += t[k] * t[k];
        stl += t[k] * l;
    }
    return (n * stl - st * sl) / (n * stt - st * st);
}

// Distance between the time-t law from z0 and a reference histogram, for
// each t; ensemble k uses derive_seed(master_seed, k).
inline TvDecay tv_decay(const ModelParams& p, const State& z0, const std::vector<double>& times, std::size_t n,
                        double dt, const HistogramSpec& spec, const Histogram2D& reference,
                        std::uint64_t master_seed) {
    TvDecay out;
    out.times = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Histogram2D h = ensemble_histogram(p, z0, n, times[k], dt, spec, derive_seed(master_seed, k));
        out.distances.push_back(tv_distance(h, reference));
    }
    out.slope = log_linear_slope(out.times, out.distances);
    return out;
}

}  // namespace driftcert
