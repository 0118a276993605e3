#ifndef MCD_RNG_HPP
#define MCD_RNG_HPP

/**
 * @file rng.hpp
 * @brief Seedable random number generation with reproducible sub-streams.
 *
 * Every stochastic component derives its own sub-seed from a master seed and
 * a stream index, so results are independent of how work is partitioned
 * (molecules across workers, trials across runs).
 */

#include <cmath>
#include <cstdint>
#include <random>

namespace mcd {

/// SplitMix64 step; used to whiten seeds and derive sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed for stream `index` of master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

/**
 * @brief Mersenne Twister engine plus explicit Gaussian sampling.
 *
 * std::normal_distribution is implementation-defined; the Marsaglia polar
 * method below pins the draw sequence to the engine output, keeping results
 * reproducible across standard libraries.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    /// Uniform in [0, 1).
    double uniform() {
        return (eng_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal deviate (Marsaglia polar method).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Bernoulli draw with success probability p.
    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mcd

#endif  // MCD_RNG_HPP
