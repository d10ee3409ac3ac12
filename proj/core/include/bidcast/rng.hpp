#pragma once

#include <cmath>
#include <cstdint>

namespace bidcast {

// splitmix64; used both as a stream generator and to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(s);
}

// Self-contained PRNG with fixed bit-level behavior. The standard <random>
// distributions are implementation-defined, so every draw the project makes
// goes through this class to keep outputs byte-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) noexcept {
        return Rng(mix_seed(seed, stream));
    }

    std::uint64_t next_u64() noexcept { return splitmix64(state_); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform01();
    }

    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        // modulo bias is < 2^-40 for the sizes used here
        return next_u64() % n;
    }

    // Marsaglia polar method
    double normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    double lognormal(double sigma) noexcept { return std::exp(sigma * normal()); }

    // Knuth's product method; fine for the small means used by the simulator.
    int poisson(double mean) noexcept {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        int k = 0;
        do {
            ++k;
            prod *= uniform01();
        } while (prod > limit);
        return k - 1;
    }

    template <typename T>
    void shuffle(T* data, std::size_t n) noexcept {
        if (n < 2) return;
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i + 1));
            T tmp = data[i];
            data[i] = data[j];
            data[j] = tmp;
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace bidcast
