#ifndef MCD_ISI_HPP
#define MCD_ISI_HPP

/**
 * @file isi.hpp
 * @brief Gaussian statistics of the received molecule count under
 *        intersymbol interference, and candidate-history enumeration.
 *
 * For a bit history b_1..b_i and M molecules per transmitted `1`, the count
 * received in slot i is modeled as Gaussian with
 *
 *     mean     = M * sum_k p_k b_{i-k+1}
 *     variance = sigma_c^2 + M * sum_k p_k (1 - p_k) b_{i-k+1},
 *
 * where p_k are the channel hitting probabilities and sigma_c^2 is additive
 * counting noise. A memoryless detector at index i must consider all
 * 2^(i-1) candidate histories; levels are built incrementally so that the
 * i = 20 level (half a million candidates per side) stays cheap.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcd/channel.hpp"
#include "mcd/rng.hpp"

namespace mcd {

/// Binary message with the prior probability of a 1.
struct BitSequence {
    std::vector<std::uint8_t> bits;
    double p1 = 0.5;

    std::size_t size() const { return bits.size(); }
};

/// Mean and variance of a received molecule count.
struct GaussianStats {
    double mu;
    double var;
};

/// Additive receiver noise (counting noise, ambient reactions).
struct NoiseParams {
    double sigma_c2 = 0.0;

    explicit NoiseParams(double s2 = 0.0) : sigma_c2(s2) {
        if (s2 < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
    }
};

/**
 * @brief Received-count statistics for a bit history ending at the current slot.
 *
 * history.back() is the current bit; earlier entries are the transmitted
 * past, oldest first. The history may not exceed the channel memory.
 */
inline GaussianStats received_stats(std::span<const std::uint8_t> history, double molecules_per_one,
                                    const HittingProfile& profile, const NoiseParams& noise) {
    const std::size_t i = history.size();
    if (i > profile.size())
        throw std::invalid_argument("bit history exceeds channel memory (profile too short)");
    double mu = 0.0, var = 0.0;
    for (std::size_t k = 1; k <= i; ++k) {
        if (!history[i - k]) continue;
        const double pk = profile.p(k);
        mu += pk;
        var += pk * (1.0 - pk);
    }
    return {molecules_per_one * mu, noise.sigma_c2 + molecules_per_one * var};
}

/// One hypothesized history of length i-1 plus the conditioning bit.
struct CandidateSeq {
    std::uint32_t level;   ///< i
    std::uint32_t j;       ///< decimal value of the reverse-ordered history
    std::uint8_t cond_bit; ///< the conditioning value of b_i
    double prob;           ///< prior probability of the history alone
    double weight;         ///< prob times the conditioning bit's prior
    GaussianStats stats;

    /// Materializes history bits b_1..b_{i-1} followed by the conditioning bit.
    std::vector<std::uint8_t> bits() const {
        std::vector<std::uint8_t> out(level);
        for (std::uint32_t m = 0; m + 1 < level; ++m) out[m] = (j >> m) & 1u;
        out[level - 1] = cond_bit;
        return out;
    }
};

/// Candidate enumeration above this level is refused; use the fitted curve instead.
inline constexpr std::size_t kEnumerationCap = 21;

namespace detail {

/**
 * @brief ISI-only sums for every history of length level-1, indexed by j.
 *
 * Stats for candidate (j, b): mu = isi_mu[j] + b M p_1,
 * var = sigma_c^2 + isi_var[j] + b M p_1 (1 - p_1).
 */
struct CandidateLevel {
    std::size_t level = 1;
    std::vector<double> isi_mu{0.0};
    std::vector<double> isi_var{0.0};
    std::vector<double> prob{1.0};

    /// Grows level i-1 to level i by prepending the oldest bit (weight p_i).
    void grow(double M, double p1_prior, const HittingProfile& profile) {
        const std::size_t next = level + 1;
        if (next > kEnumerationCap)
            throw std::domain_error("candidate enumeration capped; use the fitted threshold curve");
        if (next > profile.size())
            throw std::invalid_argument("profile shorter than requested candidate level");
        const double pk = profile.p(next);
        const double dv = pk * (1.0 - pk);
        const std::size_t n = isi_mu.size();
        std::vector<double> mu(2 * n), var(2 * n), pr(2 * n);
        for (std::size_t jp = 0; jp < n; ++jp) {
            mu[2 * jp] = isi_mu[jp];
            mu[2 * jp + 1] = isi_mu[jp] + M * pk;
            var[2 * jp] = isi_var[jp];
            var[2 * jp + 1] = isi_var[jp] + M * dv;
            pr[2 * jp] = prob[jp] * (1.0 - p1_prior);
            pr[2 * jp + 1] = prob[jp] * p1_prior;
        }
        isi_mu = std::move(mu);
        isi_var = std::move(var);
        prob = std::move(pr);
        level = next;
    }

    GaussianStats stats(std::size_t j, int cond_bit, double M, const HittingProfile& profile,
                        const NoiseParams& noise) const {
        const double p1 = profile.p(1);
        return {isi_mu[j] + (cond_bit ? M * p1 : 0.0),
                noise.sigma_c2 + isi_var[j] + (cond_bit ? M * p1 * (1.0 - p1) : 0.0)};
    }
};

inline CandidateLevel build_level(std::size_t i, double M, double p1_prior,
                                  const HittingProfile& profile) {
    if (i < 1) throw std::invalid_argument("symbol index must be >= 1");
    CandidateLevel lvl;
    for (std::size_t l = 1; l < i; ++l) lvl.grow(M, p1_prior, profile);
    return lvl;
}

}  // namespace detail

/**
 * @brief All 2^(i-1) candidates at symbol index i conditioned on one bit value.
 *
 * Candidate j is the history whose reverse-ordered bits have decimal value j;
 * higher j concentrates 1s in the most recent (highest-p) slots.
 */
inline std::vector<CandidateSeq> enumerate_candidates(std::size_t i, int conditioning_bit,
                                                      double p1_prior, double M,
                                                      const HittingProfile& profile,
                                                      const NoiseParams& noise) {
    if (i > kEnumerationCap)
        throw std::domain_error("candidate enumeration capped; use the fitted threshold curve");
    const auto lvl = detail::build_level(i, M, p1_prior, profile);
    const double cond_prior = conditioning_bit ? p1_prior : 1.0 - p1_prior;
    std::vector<CandidateSeq> out;
    out.reserve(lvl.isi_mu.size());
    for (std::size_t j = 0; j < lvl.isi_mu.size(); ++j)
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                       static_cast<std::uint8_t>(conditioning_bit), lvl.prob[j],
                       lvl.prob[j] * cond_prior,
                       lvl.stats(j, conditioning_bit, M, profile, noise)});
    return out;
}

/**
 * @brief One Gaussian draw of a received count; negative draws clamp to zero.
 *
 * Counts are physically nonnegative and decision thresholds are positive, so
 * clamping never flips a decision.
 */
inline double sample_received_count(const GaussianStats& stats, Rng& rng) {
    if (stats.var < 0.0) throw std::invalid_argument("variance must be nonnegative");
    const double c = stats.var == 0.0 ? stats.mu : rng.normal(stats.mu, std::sqrt(stats.var));
    return c < 0.0 ? 0.0 : c;
}

}  // namespace mcd

#endif  // MCD_ISI_HPP
