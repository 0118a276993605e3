#ifndef MCD_MODULATION_HPP
#define MCD_MODULATION_HPP

/**
 * @file modulation.hpp
 * @brief Transmit-side encoders (BCSK, BMoSK, MTSK) and power adjustment.
 *
 * Molecule-type conventions:
 *  - BCSK emits type A for a 1, nothing for a 0.
 *  - BMoSK emits type B for a 1 and type A for a 0 (B carries the ones).
 *  - MTSK emits nothing for a 0; a 1 emits type A when the next bit is 1 and
 *    type B when the next bit is 0, so every maximal run of 1s ends in
 *    exactly one type-B emission. A trailing 1 ends its run and uses B.
 *    Physically the encoder looks one symbol ahead, so a real transmitter
 *    emits the frame delayed by one slot; the delay shifts every emission
 *    uniformly and is omitted here.
 */

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcd/channel.hpp"
#include "mcd/isi.hpp"

namespace mcd {

enum class MoleculeType : std::uint8_t { kNone = 0, kA = 1, kB = 2 };

struct Emission {
    MoleculeType type = MoleculeType::kNone;
    double count = 0.0;
};

/// Per-slot emission schedule.
struct EmissionFrame {
    std::vector<Emission> slots;

    std::size_t size() const { return slots.size(); }

    /// Emitted counts of one molecule type as a dense per-slot series.
    std::vector<double> counts_of(MoleculeType t) const {
        std::vector<double> out(slots.size(), 0.0);
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].type == t) out[i] = slots[i].count;
        return out;
    }

    double total_emitted() const {
        double s = 0.0;
        for (const auto& e : slots) s += e.count;
        return s;
    }
};

inline EmissionFrame encode_bcsk(const BitSequence& msg, double M) {
    EmissionFrame f;
    f.slots.reserve(msg.size());
    for (auto b : msg.bits)
        f.slots.push_back(b ? Emission{MoleculeType::kA, M} : Emission{});
    return f;
}

inline EmissionFrame encode_bmosk(const BitSequence& msg, double M) {
    EmissionFrame f;
    f.slots.reserve(msg.size());
    for (auto b : msg.bits)
        f.slots.push_back(b ? Emission{MoleculeType::kB, M} : Emission{MoleculeType::kA, M});
    return f;
}

inline EmissionFrame encode_mtsk(const BitSequence& msg, double M) {
    EmissionFrame f;
    const std::size_t n = msg.size();
    f.slots.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!msg.bits[i]) {
            f.slots.push_back({});
            continue;
        }
        const bool next_is_one = (i + 1 < n) && msg.bits[i + 1];
        f.slots.push_back({next_is_one ? MoleculeType::kA : MoleculeType::kB, M});
    }
    return f;
}

/**
 * @brief Splits a message into its MTSK per-type indicator streams.
 *
 * bits_A[i] = 1 iff slot i emits type A; likewise for B. The OR of the two
 * streams recovers the original bits.
 */
inline std::pair<BitSequence, BitSequence> split_streams(const BitSequence& msg) {
    BitSequence a, b;
    a.p1 = msg.p1 * msg.p1;
    b.p1 = msg.p1 * (1.0 - msg.p1);
    const std::size_t n = msg.size();
    a.bits.assign(n, 0);
    b.bits.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!msg.bits[i]) continue;
        const bool next_is_one = (i + 1 < n) && msg.bits[i + 1];
        (next_is_one ? a.bits[i] : b.bits[i]) = 1;
    }
    return {std::move(a), std::move(b)};
}

/// Residual-memory configuration for power adjustment.
struct PAConfig {
    std::size_t K;  ///< residual memory length in slots, >= 2
    double M;       ///< nominal molecules per `1`

    PAConfig(std::size_t k, double m) : K(k), M(m) {
        if (k < 2) throw std::invalid_argument("PA memory must span at least two slots");
        if (!(m > 0.0)) throw std::invalid_argument("nominal molecule count must be positive");
    }
};

/**
 * @brief Rescales emissions so each 1 induces the same expected count p1 M
 *        at the receiver, exploiting residual molecules from the last K slots.
 *
 * Applied independently per molecule type. For emitting slot i,
 *
 *     M_i = max(0, (p1 M - sum_{j=2}^{K} p_j M_{i-j+1}) / p1);
 *
 * the division by p1 converts the receiver-side deficit into an emitted
 * count, so p1 M_i plus the expected residuals equals p1 M exactly. With no
 * residuals in range this reduces to M_i = M. Silent slots contribute zero
 * to the residual sum.
 */
inline EmissionFrame power_adjust(const EmissionFrame& frame, const HittingProfile& profile,
                                  const PAConfig& pa) {
    if (pa.K > profile.size())
        throw std::invalid_argument("PA memory exceeds the hitting profile length");
    EmissionFrame out = frame;
    const double p1 = profile.p(1);
    const double target = p1 * pa.M;
    for (MoleculeType t : {MoleculeType::kA, MoleculeType::kB}) {
        std::vector<double> adj(frame.size(), 0.0);
        for (std::size_t i = 0; i < frame.size(); ++i) {
            if (frame.slots[i].type != t) continue;
            double residual = 0.0;
            for (std::size_t j = 2; j <= pa.K && j <= i + 1; ++j)
                residual += profile.p(j) * adj[i - j + 1];
            adj[i] = std::max(0.0, (target - residual) / p1);
            out.slots[i].count = adj[i];
        }
    }
    return out;
}

/// average power per symbol: M p1 for schemes that stay silent on 0s, M otherwise
inline double average_power(const EmissionFrame& f) {
    return f.total_emitted() / static_cast<double>(f.size());
}

/// CSV rows `slot,type,count` with type in {A,B,-}.
inline void write_frame_csv(const EmissionFrame& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "slot,type,count\n";
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        const char t = f.slots[i].type == MoleculeType::kA   ? 'A'
                       : f.slots[i].type == MoleculeType::kB ? 'B'
                                                             : '-';
        std::snprintf(buf, sizeof buf, "%zu,%c,%.10g\n", i + 1, t, f.slots[i].count);
        out << buf;
    }
}

}  // namespace mcd

#endif  // MCD_MODULATION_HPP
