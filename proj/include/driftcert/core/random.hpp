#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al., SC 2011).
//
// Every draw is a pure function of (key, counter), so a stream can be
// addressed directly by (seed, stream index, draw index) without carrying
// generator state between workers.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace driftcert {

class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr counter_type generate(counter_type ctr, key_type key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr counter_type single_round(const counter_type& c, const key_type& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// SplitMix64 finalizer; used to derive independent keys from a master seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ull));
}

// Uniform on [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Two independent standard normals from 128 random bits (Box-Muller).
inline std::pair<double, double> box_muller(std::uint64_t b0, std::uint64_t b1) {
    const double u1 = 1.0 - to_unit(b0);  // (0, 1]
    const double u2 = to_unit(b1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

// Block number `block` of the stream keyed by `key`, as two 64-bit words.
inline std::pair<std::uint64_t, std::uint64_t> philox_block(std::uint64_t key, std::uint64_t stream,
                                                            std::uint64_t block) {
    const Philox4x32::key_type k{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    const Philox4x32::counter_type c{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                     static_cast<std::uint32_t>(stream),
                                     static_cast<std::uint32_t>(stream >> 32)};
    const auto out = Philox4x32::generate(c, k);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

// Sequential view of one counter-based stream. Cheap to construct; two
// Streams with the same (seed, id) produce the same sequence.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t id) : key_(mix64(seed)), id_(id) {}

    std::uint64_t next_bits() {
        if (!have_spare_) {
            auto [a, b] = philox_block(key_, id_, block_++);
            spare_ = b;
            have_spare_ = true;
            return a;
        }
        have_spare_ = false;
        return spare_;
    }

    double uniform() { return to_unit(next_bits()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) { return lo * std::pow(hi / lo, uniform()); }
    double sign() { return (next_bits() >> 63) != 0 ? -1.0 : 1.0; }

    double normal() {
        const std::uint64_t b0 = next_bits();
        const std::uint64_t b1 = next_bits();
        return box_muller(b0, b1).first;
    }

private:
    std::uint64_t key_;
    std::uint64_t id_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

// Noise for path `path` of an ensemble keyed by `path_seed`: step `step`
// maps to exactly one Philox block, i.e. one (xi1, xi2) pair.
struct PathNoise {
    std::uint64_t key;

    explicit PathNoise(std::uint64_t path_seed) : key(mix64(path_seed)) {}

    std::pair<double, double> operator()(std::uint64_t step) const {
        auto [a, b] = philox_block(key, 0x5DEECE66Dull, step);
        return box_muller(a, b);
    }
};

}  // namespace driftcert
