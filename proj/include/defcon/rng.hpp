#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace defcon {

// Deterministic RNG helpers. std::mt19937_64 is bit-stable across platforms,
// but the standard distributions are not, so we map raw draws ourselves.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is negligible for n << 2^64 and keeps draws reproducible
        return engine_() % n;
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Sample an index from an (unnormalized) weight vector.
    template <typename Container>
    std::size_t categorical(const Container& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        std::size_t last = 0;
        std::size_t i = 0;
        for (double w : weights) {
            u -= w;
            if (u < 0.0) return i;
            last = i;
            ++i;
        }
        return last;
    }

    // Derive an independent child stream (for per-match seeding).
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = seed_mix_ ^ (salt * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return Rng(x);
    }

    void note_seed(std::uint64_t seed) { seed_mix_ = seed; }

    static Rng seeded(std::uint64_t seed) {
        Rng r(seed);
        r.note_seed(seed);
        return r;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_mix_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace defcon
