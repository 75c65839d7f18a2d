#pragma once

#include <cmath>
#include <cstdint>

namespace bridgekit {

// Counter-based deterministic generator.
//
// Output word k is SplitMix64 applied to (seed + (k+1) * GOLDEN), i.e. the
// standard SplitMix64 stream started at `seed`. The uint64 stream is exactly
// reproducible on any platform; uniforms take the top 53 bits, normals come
// from a Box-Muller pair (these additionally depend on libm's log/cos/sin,
// which is bit-stable on a given platform).
//
// Single-owner: never share one RngState between concurrent tasks. For
// parallel Monte Carlo, derive one state per worker with fork(worker_index).
struct RngState {
    explicit RngState(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_uniform(); // (0, 1], keeps log finite
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Independent stream for worker/path `index`; deterministic in (seed, index).
    RngState fork(std::uint64_t index) const {
        std::uint64_t z = state_ ^ (0xD1B54A32D192ED03ULL * (index + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return RngState(z ^ (z >> 31));
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bridgekit
