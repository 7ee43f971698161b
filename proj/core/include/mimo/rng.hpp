#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace mimo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Counter-keyed xoshiro256++ stream.
//
// Every stream remembers the key it was derived from, so child streams can be
// spawned by hashing (key, tags) without consuming any state from the parent.
// Work units (network drops, coherence blocks) each get their own child
// stream, which makes results independent of thread scheduling and of how
// sibling units are interleaved.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {
        std::uint64_t sm = key;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    /// Derive an independent stream from this stream's key and up to three tags.
    RngStream child(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        std::uint64_t sm = key_;
        std::uint64_t k = detail::splitmix64(sm);
        sm = k ^ a;
        k = detail::splitmix64(sm);
        sm = k ^ b;
        k = detail::splitmix64(sm);
        sm = k ^ c;
        return RngStream(detail::splitmix64(sm));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in (0, 1].
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (one spare cached per pair).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform();
        const double v = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 2.0 * M_PI * v;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly symmetric complex normal CN(0, 1): real and imaginary
    /// parts are independent N(0, 1/2).
    std::complex<double> cgaussian() {
        const double u = uniform();
        const double v = uniform();
        const double radius = std::sqrt(-std::log(u));
        const double angle = 2.0 * M_PI * v;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    std::uint64_t key_;
    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mimo
