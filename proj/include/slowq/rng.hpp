#pragma once

#include <cmath>
#include <cstdint>

namespace slowq {

/// SplitMix64: tiny, fast, and splittable by seed mixing, so named streams
/// (arrivals, services, ...) can share or separate randomness exactly.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in (0, 1]; never zero, so log() stays finite.
    double uniform01() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    std::uint64_t state_;
};

/// Independent stream keyed by (seed, tag).
inline SplitMix64 named_stream(std::uint64_t seed, std::uint64_t tag) {
    SplitMix64 mixer(seed ^ (tag * 0xd1342543de82ef95ULL));
    return SplitMix64(mixer.next());
}

}  // namespace slowq
