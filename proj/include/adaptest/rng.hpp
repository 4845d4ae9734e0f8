#pragma once

#include <cmath>
#include <cstdint>

namespace adaptest {

// All randomness in the library flows through one documented generator:
// xoshiro256++ (Blackman/Vigna), with state seeded by splitmix64 from a
// (master seed, stream tag, stream index) triple.  Replications and
// purposes get disjoint streams, so parallel reductions are independent
// of worker count and every simulated quantity is a pure function of the
// seed.  Reproducibility holds within a build; cross-platform bit
// equality of the downstream doubles is not promised.

inline std::uint64_t splitmix64_next(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Collapses (master, a, b) into one well-mixed 64-bit value.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64_next(s);
    s ^= a * 0xD6E8FEB86659FD93ull;
    h ^= splitmix64_next(s);
    s ^= b * 0xA3B195354A39B70Dull;
    h ^= splitmix64_next(s);
    return h;
}

// Stream tags keep draws for different purposes out of each other's way.
namespace stream_tag {
inline constexpr std::uint64_t regression = 1;
inline constexpr std::uint64_t pvalues = 2;
inline constexpr std::uint64_t critval_point = 3;
inline constexpr std::uint64_t critval_rd = 4;
inline constexpr std::uint64_t critval_pi0 = 5;
inline constexpr std::uint64_t lemma = 6;
inline constexpr std::uint64_t experiment = 7;
inline constexpr std::uint64_t fixture = 8;
} // namespace stream_tag

class Rng {
public:
    Rng() : Rng(0, 0, 0) {}

    Rng(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
        std::uint64_t s = derive_seed(master, tag, index);
        s_[0] = splitmix64_next(s);
        s_[1] = splitmix64_next(s);
        s_[2] = splitmix64_next(s);
        s_[3] = splitmix64_next(s);
        // splitmix64 output is never all-zero across four words in practice,
        // but xoshiro requires it, so guard anyway.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
            s_[3] = 1;
    }

    static Rng from_stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
        return Rng(master, tag, index);
    }

    std::uint64_t next_u64() {
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

    // Uniform strictly inside (0,1): 53 bits, offset by half an ulp so the
    // endpoints are unreachable (safe under log()).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Marsaglia polar method; the spare keeps consumption deterministic.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double next_exponential() { return -std::log(next_unit()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace adaptest
