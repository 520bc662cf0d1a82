#ifndef REPROCS_RNG_HPP
#define REPROCS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace reprocs {

// Counter-based, splittable PRNG.
//
// The generator is a keyed SplitMix64: output_i = mix(key + i * gamma).
// Because the state is just (key, counter), streams can be forked with
// split(label), which derives a new key from the parent key and the label.
// Every random quantity in an experiment is reached through a chain of
// splits from one root seed, so runs are bit-reproducible regardless of
// evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0)
        : key_(mix64(seed + kKeyTweak)), counter_(0) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
        const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<std::int64_t>(wide >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; two uniforms consumed per call, no cached spare.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

    // Child generator with an independent stream for the given label.
    Rng split(std::uint64_t label) const {
        Rng child;
        child.key_ = mix64(mix64(key_ + kSplitTweak) + label * kGamma);
        child.counter_ = 0;
        return child;
    }

    Rng split(std::string_view label) const { return split(fnv1a(label)); }

    std::uint64_t key() const { return key_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kKeyTweak = 0x6a09e667f3bcc909ULL;
    static constexpr std::uint64_t kSplitTweak = 0xbb67ae8584caa73bULL;

    // Stafford variant 13 of the SplitMix64 finalizer.
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace reprocs

#endif  // REPROCS_RNG_HPP
