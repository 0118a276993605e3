#ifndef MCD_DETECTION_HPP
#define MCD_DETECTION_HPP

/**
 * @file detection.hpp
 * @brief Receive-side decoders: scheduled thresholding, BMoSK comparison,
 *        the MTSK dual-threshold rule, empirical threshold search, and the
 *        decision feedback filter.
 *
 * Tie rule everywhere: a count exactly equal to its threshold decodes as 0.
 */

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcd/channel.hpp"
#include "mcd/isi.hpp"
#include "mcd/threshold.hpp"

namespace mcd {

/// Per-slot received molecule counts, one series per molecule type.
struct ReceivedFrame {
    std::vector<double> counts_A;
    std::vector<double> counts_B;

    std::size_t size() const { return counts_A.size(); }

    void validate() const {
        if (counts_A.size() != counts_B.size())
            throw std::invalid_argument("type-A and type-B series differ in length");
    }
};

/// BCSK path: b_i = 1 iff the type-A count exceeds the scheduled threshold.
inline BitSequence decode_threshold(const ReceivedFrame& frame, const ThresholdSchedule& schedule) {
    BitSequence out;
    out.bits.reserve(frame.size());
    for (std::size_t i = 0; i < frame.counts_A.size(); ++i)
        out.bits.push_back(frame.counts_A[i] > schedule.gamma_at(i + 1) ? 1 : 0);
    return out;
}

/// BMoSK comparison rule: b_i = 1 iff more type-B than type-A molecules arrived.
inline BitSequence decode_bmosk(const ReceivedFrame& frame) {
    frame.validate();
    BitSequence out;
    out.bits.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i)
        out.bits.push_back(frame.counts_B[i] > frame.counts_A[i] ? 1 : 0);
    return out;
}

/// MTSK dual-threshold rule: 1 iff either type exceeds its own schedule.
inline BitSequence decode_mtsk(const ReceivedFrame& frame, const ThresholdSchedule& schedule_A,
                               const ThresholdSchedule& schedule_B) {
    frame.validate();
    BitSequence out;
    out.bits.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const bool one = frame.counts_A[i] > schedule_A.gamma_at(i + 1) ||
                         frame.counts_B[i] > schedule_B.gamma_at(i + 1);
        out.bits.push_back(one ? 1 : 0);
    }
    return out;
}

/// Sliding window of past decisions for the decision feedback filter.
struct DFFState {
    std::vector<std::uint8_t> memory;  ///< most recent decision first
    std::size_t S;

    explicit DFFState(std::size_t s) : S(s) {
        if (s < 2) throw std::invalid_argument("DFF memory must be at least 2");
        memory.assign(s - 1, 0);  // channel assumed molecule-free before transmission
    }

    void push(std::uint8_t bit) {
        for (std::size_t k = memory.size(); k-- > 1;) memory[k] = memory[k - 1];
        memory[0] = bit;
    }
};

/**
 * @brief Decision feedback filter over a single-type count series.
 *
 * Per slot the filter rebuilds the two hypothesis Gaussians from the last
 * S-1 decisions,
 *
 *     mu0 = M sum_{k=2..S} p_k bhat_{i-k+1},          mu1 = mu0 + M p1,
 *     var0 = sigma_c^2 + M sum_{k=2..S} p_k(1-p_k) bhat_{i-k+1},
 *     var1 = var0 + M p1 (1 - p1),
 *
 * solves the pairwise MAP quadratic with priors (1-p1, p1), decides, and
 * feeds the decision back. Wrong decisions propagate; that is inherent.
 */
inline BitSequence dff_decode(const std::vector<double>& counts, double M,
                              const HittingProfile& profile, const NoiseParams& noise,
                              std::size_t S, double p1_prior) {
    if (S < 2) throw std::invalid_argument("DFF memory must be at least 2");
    if (S > profile.size())
        throw std::invalid_argument("DFF memory exceeds the hitting profile length");
    const double p1 = profile.p(1);
    const double mu_step = M * p1;
    const double var_step = M * p1 * (1.0 - p1);
    DFFState state(S);
    BitSequence out;
    out.p1 = p1_prior;
    out.bits.reserve(counts.size());
    for (double c : counts) {
        double mu0 = 0.0, var0 = noise.sigma_c2;
        for (std::size_t k = 2; k <= S; ++k) {
            if (!state.memory[k - 2]) continue;
            const double pk = profile.p(k);
            mu0 += M * pk;
            var0 += M * pk * (1.0 - pk);
        }
        const double gamma = pairwise_threshold({mu0, var0}, {mu0 + mu_step, var0 + var_step},
                                                1.0 - p1_prior, p1_prior);
        const std::uint8_t bit = c > gamma ? 1 : 0;
        out.bits.push_back(bit);
        state.push(bit);
    }
    return out;
}

/**
 * @brief Constant threshold minimizing the Hamming distance to a known message.
 *
 * The error count as a function of gamma only changes at distinct count
 * values, so scanning the sorted counts finds the global optimum. Returns the
 * midpoint of the optimal plateau.
 */
inline double empirical_threshold(const std::vector<double>& counts, const BitSequence& truth) {
    if (counts.size() != truth.size())
        throw std::invalid_argument("counts and truth differ in length");
    if (counts.empty()) throw std::invalid_argument("empty message");
    const std::size_t n = counts.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });

    // errors(gamma) with gamma below every count: all decode 1
    std::size_t zeros_total = 0;
    for (auto b : truth.bits) zeros_total += b ? 0 : 1;
    std::size_t best_err = zeros_total;
    double best_gamma = counts[order[0]] - 1.0;

    // sweep gamma through each distinct count value c: counts <= c decode 0
    std::size_t ones_below = 0, zeros_below = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[k];
        if (truth.bits[idx]) ++ones_below; else ++zeros_below;
        if (k + 1 < n && counts[order[k + 1]] == counts[idx]) continue;
        const std::size_t err = ones_below + (zeros_total - zeros_below);
        if (err < best_err) {
            best_err = err;
            best_gamma = (k + 1 < n) ? 0.5 * (counts[idx] + counts[order[k + 1]])
                                     : counts[idx] + 1.0;
        }
    }
    return best_gamma;
}

/// Hamming distance between two equal-length bit sequences.
inline std::size_t hamming_distance(const BitSequence& a, const BitSequence& b) {
    if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a.bits[i] != b.bits[i];
    return d;
}

/// CSV rows `index,bit`.
inline void write_bits_csv(const BitSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "index,bit\n";
    for (std::size_t i = 0; i < seq.size(); ++i)
        out << (i + 1) << ',' << int(seq.bits[i]) << '\n';
}

}  // namespace mcd

#endif  // MCD_DETECTION_HPP
