#ifndef CAUSALTS_RNG_HPP
#define CAUSALTS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace causalts {

// Deterministic counter-friendly RNG. The standard <random> distributions are
// implementation-defined, which breaks the byte-identical-rerun guarantee, so all
// randomness in the library flows through this splitmix64 chain instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(0x9e3779b97f4a7c15ULL, seed)) {}

    // Derive an independent substream keyed by `key`. Used for per-row sampling
    // streams so results do not depend on evaluation order.
    Rng stream(std::uint64_t key) const { return Rng(mix(state_, mix(key, 0xbf58476d1ce4e5b9ULL))); }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Requires n >= 1.
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    // Standard normal via Box-Muller; draws two uniforms per call.
    double normal() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            int j = uniform_int(i + 1);
            std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace causalts

#endif
