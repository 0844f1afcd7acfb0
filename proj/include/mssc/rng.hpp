#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mssc {

/// splitmix64 step; used to derive independent seed streams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes a base seed with purpose tags into a fresh stream seed, so that the
/// separation pass, the heuristic restarts, etc. of one run never share bits.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = base;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t t : tags) {
        s ^= t + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        out = splitmix64(s);
    }
    return out;
}

/// Deterministic random source.
///
/// All transforms (uniform reals, bounded integers, normals) are spelled out
/// on top of the raw mt19937_64 stream instead of using std::*_distribution,
/// whose output is implementation-defined. This keeps every seeded run
/// bit-reproducible across standard libraries and lets tests mirror the
/// stream independently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in {0, ..., bound-1} by masked rejection (unbiased).
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> countl_zero(bound - 1);
        std::uint64_t r;
        do {
            r = u64() & mask;
        } while (r >= bound);
        return r;
    }

    /// Uniform integer in {lo, ..., hi} inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Standard normal via Box-Muller; the second draw of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite.
        double u1 = (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static int countl_zero(std::uint64_t x) {
        int n = 0;
        for (std::uint64_t bit = std::uint64_t{1} << 63; bit != 0 && !(x & bit); bit >>= 1) ++n;
        return n;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mssc
