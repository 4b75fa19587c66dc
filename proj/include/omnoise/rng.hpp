#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace omnoise {

// splitmix64: counter-based 64-bit mixer; used both to derive independent
// stream seeds from (seed, stream index) and to initialize generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Hash of (seed, stream) defining per-sweep-point substreams.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna); state seeded through splitmix64 so any
// 64-bit seed gives a well-mixed state. Deterministic and portable.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static Xoshiro256pp for_stream(std::uint64_t seed, std::uint64_t stream) {
        return Xoshiro256pp(derive_stream_seed(seed, stream));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // circularly-symmetric complex Gaussian with E|z|^2 = variance,
    // via amplitude-phase inversion (no rejection, fixed draw count).
    std::complex<double> complex_normal(double variance) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double amp = std::sqrt(-variance * std::log1p(-u1));
        return {amp * std::cos(6.283185307179586477 * u2),
                amp * std::sin(6.283185307179586477 * u2)};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace omnoise
