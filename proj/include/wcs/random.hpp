#ifndef WCS_RANDOM_HPP
#define WCS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

namespace wcs {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-chain random stream derived from (seed, chain).
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t chain = 0)
        : eng_(splitmix64(splitmix64(seed) ^ splitmix64(chain + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next() { return eng_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = eng_();
            if (r >= threshold) return r % n;
        }
    }
    /// Index drawn proportionally to non-negative weights; -1 if all zero.
    int discrete(std::span<const double> w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) return -1;
        double u = uniform() * total;
        double acc = 0.0;
        int last = -1;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] <= 0.0) continue;
            acc += w[i];
            last = static_cast<int>(i);
            if (u < acc) return last;
        }
        return last;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wcs

#endif
