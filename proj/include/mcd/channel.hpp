#ifndef MCD_CHANNEL_HPP
#define MCD_CHANNEL_HPP

/**
 * @file channel.hpp
 * @brief Closed-form response of a diffusion channel with a point transmitter
 *        and a perfectly absorbing spherical receiver.
 *
 * A point source at distance r0 from the center of an absorbing sphere of
 * radius rr releases molecules that diffuse with coefficient D. The fraction
 * of molecules absorbed by time t is
 *
 *     F_hit(t) = (rr/r0) * erfc((r0 - rr) / sqrt(4 D t)),
 *
 * and its time derivative f_hit(t) is the hitting rate. Slicing F_hit at
 * multiples of the symbol duration t_s yields the per-slot hitting
 * probabilities p_k that characterize the discrete channel.
 *
 * Units are fixed at micrometers, seconds, and um^2/s throughout.
 */

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mcd/gauss.hpp"

namespace mcd {

/// Physical description of the link. Validates on construction.
struct ChannelParams {
    double receiver_radius;   ///< rr, um
    double distance;          ///< r0, transmitter to receiver center, um
    double diffusion;         ///< D, um^2/s
    double symbol_duration;   ///< t_s, s

    ChannelParams(double rr, double r0, double D, double ts)
        : receiver_radius(rr), distance(r0), diffusion(D), symbol_duration(ts) {
        if (!(rr > 0.0)) throw std::invalid_argument("receiver radius must be positive");
        if (!(r0 > rr)) throw std::invalid_argument("transmitter must lie strictly outside the receiver");
        if (!(D > 0.0)) throw std::invalid_argument("diffusion coefficient must be positive");
        if (!(ts > 0.0)) throw std::invalid_argument("symbol duration must be positive");
    }

    /// Gap between source and receiver surface, r0 - rr.
    double gap() const { return distance - receiver_radius; }
};

/**
 * @brief Fraction of released molecules absorbed by time t.
 *
 * Monotone nondecreasing, F_hit(0) = 0, and F_hit(t) -> rr/r0 as t -> inf.
 */
inline double cumulative_hit_fraction(const ChannelParams& cp, double t) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    if (t == 0.0) return 0.0;
    return (cp.receiver_radius / cp.distance) *
           std::erfc(cp.gap() / std::sqrt(4.0 * cp.diffusion * t));
}

/// Hitting rate f_hit(t) (1/s); the density of absorption times. Requires t > 0.
inline double hitting_rate(const ChannelParams& cp, double t) {
    if (!(t > 0.0)) throw std::domain_error("hitting rate is defined for t > 0");
    const double d = cp.gap();
    return (cp.receiver_radius / cp.distance) *
           (1.0 / std::sqrt(4.0 * kPi * cp.diffusion * t)) * (d / t) *
           std::exp(-d * d / (4.0 * cp.diffusion * t));
}

/// Expected pulse peak time, gap^2 / (6 D); the argmax of f_hit.
inline double peak_time(const ChannelParams& cp) {
    const double d = cp.gap();
    return d * d / (6.0 * cp.diffusion);
}

/**
 * @brief Per-slot hitting probabilities p_1..p_K.
 *
 * p_k is the probability that a molecule released at the start of slot 1 is
 * absorbed during slot k. The cumulative values F_hit(k t_s) are cached so
 * partial sums of p telescope back to them exactly.
 */
class HittingProfile {
public:
    HittingProfile(const ChannelParams& cp, std::size_t k_max) : ts_(cp.symbol_duration) {
        if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
        cum_.resize(k_max + 1);
        cum_[0] = 0.0;
        for (std::size_t k = 1; k <= k_max; ++k)
            cum_[k] = cumulative_hit_fraction(cp, static_cast<double>(k) * ts_);
        p_.resize(k_max);
        for (std::size_t k = 0; k < k_max; ++k) p_[k] = cum_[k + 1] - cum_[k];
    }

    std::size_t size() const { return p_.size(); }
    double symbol_duration() const { return ts_; }

    /// p_k, 1-indexed.
    double p(std::size_t k) const { return p_.at(k - 1); }
    const std::vector<double>& probabilities() const { return p_; }

    /// Exact partial sum p_1 + ... + p_k = F_hit(k t_s).
    double partial_sum(std::size_t k) const { return cum_.at(k); }

    /// True iff p_1 > p_2 > ... > p_k for the first k slots.
    bool descending(std::size_t k) const {
        for (std::size_t i = 1; i < k; ++i)
            if (!(p_.at(i - 1) > p_.at(i))) return false;
        return true;
    }

private:
    double ts_;
    std::vector<double> p_;
    std::vector<double> cum_;
};

inline HittingProfile hitting_probabilities(const ChannelParams& cp, std::size_t k_max) {
    return HittingProfile(cp, k_max);
}

/**
 * @brief Checks that the symbol duration makes hitting probabilities strictly
 *        descending over the first k_max slots.
 *
 * Detection theory below assumes this ordering; symbol durations that end a
 * slot before the hitting-rate peak violate it.
 */
inline bool validate_symbol_duration(const ChannelParams& cp, std::size_t k_max) {
    if (k_max < 2) throw std::invalid_argument("need at least two slots to check ordering");
    return HittingProfile(cp, k_max).descending(k_max);
}

}  // namespace mcd

#endif  // MCD_CHANNEL_HPP
