#ifndef MCD_HARNESS_HPP
#define MCD_HARNESS_HPP

/**
 * @file harness.hpp
 * @brief Seeded Monte Carlo BER experiments across schemes, powers, and
 *        receiver configurations, plus the short-sequence closed forms.
 *
 * Received counts are synthesized from the Gaussian ISI model by default
 * (per-type superposition of the channel response plus counting noise); the
 * particle physics mode replays every emission through the Brownian
 * simulator for cross-validation.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcd/channel.hpp"
#include "mcd/detection.hpp"
#include "mcd/gauss.hpp"
#include "mcd/isi.hpp"
#include "mcd/modulation.hpp"
#include "mcd/particle.hpp"
#include "mcd/plot.hpp"
#include "mcd/rng.hpp"
#include "mcd/threshold.hpp"

namespace mcd {

enum class Scheme { kBcsk, kBmosk, kMtsk };
enum class Physics { kGaussian, kParticle };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kBcsk: return "bcsk";
        case Scheme::kBmosk: return "bmosk";
        case Scheme::kMtsk: return "mtsk";
    }
    return "?";
}

struct ExperimentConfig {
    ChannelParams channel{5.0, 10.0, 79.4, 0.2};  // reference parameter set
    NoiseParams noise{1.0};
    Scheme scheme = Scheme::kBcsk;
    bool pa = false;              ///< power adjustment on consecutive emissions
    std::optional<double> M;      ///< molecules per 1; exactly one of M / pbar
    std::optional<double> pbar;   ///< average power per symbol
    double p1 = 0.5;              ///< prior P[b_i = 1]
    std::size_t n_bits = 1000;    ///< message length per trial
    std::size_t n_trials = 100;   ///< base trial count (auto-extends, see below)
    std::size_t k_pa = 4;         ///< PA residual memory
    std::size_t s_dff = 0;        ///< DFF memory; 0 selects threshold detection
    std::size_t k_max = 100;      ///< hitting-profile length (channel memory)
    std::size_t i_exact = 20;     ///< exact thresholds before the fitted curve
    ThresholdStrategy strategy = ThresholdStrategy::kPerIndex;
    Physics physics = Physics::kGaussian;
    double sim_dt = 2e-3;         ///< particle-physics step
    std::uint64_t seed = 1;
    std::size_t min_errors = 100;   ///< auto-extend trials until this many errors
    std::size_t max_trials = 5000;  ///< hard cap for the extension

    /// Molecules per 1 implied by the power specification.
    double molecules_per_one() const {
        if (M.has_value() == pbar.has_value())
            throw std::invalid_argument("specify exactly one of M and pbar");
        if (M) return *M;
        // average power per symbol: pbar = M p1 when 0s are silent, pbar = M for BMoSK
        return scheme == Scheme::kBmosk ? *pbar : *pbar / p1;
    }

    double average_power() const {
        const double m = molecules_per_one();
        return scheme == Scheme::kBmosk ? m : m * p1;
    }
};

struct BERResult {
    std::string scheme;
    double pbar = 0.0;
    std::size_t k_pa = 0;   ///< 0 when PA is off
    std::size_t s_dff = 0;  ///< 0 when the DFF is not used
    double ber = 0.0;
    std::size_t n_errors = 0;
    std::size_t n_bits_total = 0;
    double ci_halfwidth = 0.0;  ///< 95% normal-approximation half-width
    std::uint64_t seed = 0;
};

namespace detail {

/// Gaussian-model synthesis: superpose each emission's slot contributions.
inline std::vector<double> synth_counts_gaussian(const std::vector<double>& emitted,
                                                 const HittingProfile& profile,
                                                 const NoiseParams& noise, Rng& rng) {
    const std::size_t n = emitted.size();
    const std::size_t kmax = profile.size();
    std::vector<double> mean(n, 0.0), var(n, noise.sigma_c2);
    for (std::size_t j = 0; j < n; ++j) {
        const double e = emitted[j];
        if (e <= 0.0) continue;
        const std::size_t last = std::min(n - 1, j + kmax - 1);
        for (std::size_t i = j; i <= last; ++i) {
            const double pk = profile.p(i - j + 1);
            mean[i] += e * pk;
            var[i] += e * pk * (1.0 - pk);
        }
    }
    std::vector<double> counts(n);
    for (std::size_t i = 0; i < n; ++i)
        counts[i] = sample_received_count({mean[i], var[i]}, rng);
    return counts;
}

/// Particle synthesis: every emission becomes a Brownian release burst.
inline std::vector<double> synth_counts_particle(const std::vector<double>& emitted,
                                                 const ChannelParams& cp, double dt,
                                                 const NoiseParams& noise, std::uint64_t seed,
                                                 Rng& noise_rng) {
    const std::size_t n = emitted.size();
    const double ts = cp.symbol_duration;
    std::vector<double> counts(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto molecules = static_cast<std::size_t>(std::llround(emitted[j]));
        if (molecules == 0) continue;
        const double horizon = static_cast<double>(n - j) * ts;
        SimConfig sim(dt, molecules, horizon, derive_seed(seed, j));
        const auto rec = simulate_release(cp, sim);
        const auto binned = slot_counts(rec, ts, n - j);
        for (std::size_t k = 0; k < binned.size(); ++k)
            counts[j + k] += static_cast<double>(binned[k]);
    }
    if (noise.sigma_c2 > 0.0) {
        const double sc = std::sqrt(noise.sigma_c2);
        for (auto& c : counts) c = std::max(0.0, c + sc * noise_rng.normal());
    }
    return counts;
}

struct TrialDecoder {
    // schedules for the analytic-threshold path (empty under PA)
    std::optional<ThresholdSchedule> sched_a, sched_b;
    // constant empirical thresholds for the PA path
    double emp_a = 0.0, emp_b = 0.0;
};

}  // namespace detail

/**
 * @brief Runs one seeded BER experiment.
 *
 * Messages are drawn with prior p1, encoded (PA applied per molecule type if
 * enabled), passed through the configured physics, and decoded. Trials extend
 * past n_trials until min_errors errors or the max_trials cap, so low-BER
 * points keep useful confidence intervals. Deterministic given the seed.
 */
inline BERResult run_ber(const ExperimentConfig& cfg) {
    const double M = cfg.molecules_per_one();
    if (cfg.n_bits == 0) throw std::invalid_argument("empty message");
    if (cfg.s_dff > 0 && cfg.scheme != Scheme::kBcsk)
        throw std::invalid_argument("the decision feedback filter applies to the BCSK path");
    const HittingProfile profile(cfg.channel, cfg.k_max);
    if (!profile.descending(std::min<std::size_t>(profile.size(), 20)))
        throw std::invalid_argument("symbol duration leaves hitting probabilities non-descending");

    detail::TrialDecoder dec;
    if (cfg.pa) {
        // thresholds under PA are found empirically on a pilot message
        const std::size_t pilot_bits = 20000;
        Rng prng(derive_seed(cfg.seed, 0x9107u));  // pilot sub-stream
        BitSequence pilot;
        pilot.p1 = cfg.p1;
        pilot.bits.resize(pilot_bits);
        for (auto& b : pilot.bits) b = prng.bernoulli(cfg.p1) ? 1 : 0;
        EmissionFrame frame;
        switch (cfg.scheme) {
            case Scheme::kBcsk: frame = encode_bcsk(pilot, M); break;
            case Scheme::kBmosk: frame = encode_bmosk(pilot, M); break;
            case Scheme::kMtsk: frame = encode_mtsk(pilot, M); break;
        }
        frame = power_adjust(frame, profile, PAConfig(cfg.k_pa, M));
        const auto ca = detail::synth_counts_gaussian(frame.counts_of(MoleculeType::kA), profile,
                                                      cfg.noise, prng);
        if (cfg.scheme == Scheme::kBcsk) {
            dec.emp_a = empirical_threshold(ca, pilot);
        } else if (cfg.scheme == Scheme::kMtsk) {
            const auto cb = detail::synth_counts_gaussian(frame.counts_of(MoleculeType::kB),
                                                          profile, cfg.noise, prng);
            auto [sa, sb] = split_streams(pilot);
            dec.emp_a = empirical_threshold(ca, sa);
            dec.emp_b = empirical_threshold(cb, sb);
        }
    } else if (cfg.s_dff == 0) {
        if (cfg.scheme == Scheme::kBcsk)
            dec.sched_a = threshold_schedule(M, profile, cfg.p1, cfg.noise, cfg.i_exact,
                                             cfg.strategy);
        if (cfg.scheme == Scheme::kMtsk) {
            dec.sched_a = threshold_schedule(M, profile, cfg.p1 * cfg.p1, cfg.noise, cfg.i_exact,
                                             cfg.strategy);
            dec.sched_b = threshold_schedule(M, profile, cfg.p1 * (1.0 - cfg.p1), cfg.noise,
                                             cfg.i_exact, cfg.strategy);
        }
    }

    BERResult res;
    res.scheme = scheme_name(cfg.scheme);
    res.pbar = cfg.average_power();
    res.k_pa = cfg.pa ? cfg.k_pa : 0;
    res.s_dff = cfg.s_dff;
    res.seed = cfg.seed;

    const std::size_t cap = std::max(cfg.n_trials, cfg.max_trials);
    for (std::size_t trial = 0; trial < cap; ++trial) {
        if (trial >= cfg.n_trials && res.n_errors >= cfg.min_errors) break;
        const std::uint64_t tseed = derive_seed(cfg.seed, trial + 1);
        Rng rng(tseed);
        BitSequence msg;
        msg.p1 = cfg.p1;
        msg.bits.resize(cfg.n_bits);
        for (auto& b : msg.bits) b = rng.bernoulli(cfg.p1) ? 1 : 0;

        EmissionFrame frame;
        switch (cfg.scheme) {
            case Scheme::kBcsk: frame = encode_bcsk(msg, M); break;
            case Scheme::kBmosk: frame = encode_bmosk(msg, M); break;
            case Scheme::kMtsk: frame = encode_mtsk(msg, M); break;
        }
        if (cfg.pa) frame = power_adjust(frame, profile, PAConfig(cfg.k_pa, M));

        ReceivedFrame rx;
        auto synth = [&](MoleculeType t, std::uint64_t salt) {
            const auto emitted = frame.counts_of(t);
            if (cfg.physics == Physics::kGaussian)
                return detail::synth_counts_gaussian(emitted, profile, cfg.noise, rng);
            return detail::synth_counts_particle(emitted, cfg.channel, cfg.sim_dt, cfg.noise,
                                                 derive_seed(tseed, salt), rng);
        };
        rx.counts_A = synth(MoleculeType::kA, 0xA);
        rx.counts_B = cfg.scheme == Scheme::kBcsk ? std::vector<double>(cfg.n_bits, 0.0)
                                                  : synth(MoleculeType::kB, 0xB);

        BitSequence decoded;
        switch (cfg.scheme) {
            case Scheme::kBcsk:
                if (cfg.s_dff > 0)
                    decoded = dff_decode(rx.counts_A, M, profile, cfg.noise, cfg.s_dff, cfg.p1);
                else if (cfg.pa)
                    decoded.bits = [&] {
                        std::vector<std::uint8_t> d(cfg.n_bits);
                        for (std::size_t i = 0; i < cfg.n_bits; ++i)
                            d[i] = rx.counts_A[i] > dec.emp_a ? 1 : 0;
                        return d;
                    }();
                else
                    decoded = decode_threshold(rx, *dec.sched_a);
                break;
            case Scheme::kBmosk:
                decoded = decode_bmosk(rx);
                break;
            case Scheme::kMtsk:
                if (cfg.pa) {
                    decoded.bits.resize(cfg.n_bits);
                    for (std::size_t i = 0; i < cfg.n_bits; ++i)
                        decoded.bits[i] =
                            (rx.counts_A[i] > dec.emp_a || rx.counts_B[i] > dec.emp_b) ? 1 : 0;
                } else {
                    decoded = decode_mtsk(rx, *dec.sched_a, *dec.sched_b);
                }
                break;
        }
        res.n_errors += hamming_distance(decoded, msg);
        res.n_bits_total += cfg.n_bits;
    }
    res.ber = static_cast<double>(res.n_errors) / static_cast<double>(res.n_bits_total);
    res.ci_halfwidth =
        1.96 * std::sqrt(res.ber * (1.0 - res.ber) / static_cast<double>(res.n_bits_total));
    return res;
}

/**
 * @brief Closed-form error probability of the last bit of a short message.
 *
 * Conditions on the true transmitted history (up to three bits). Thresholds:
 * one value for BCSK, none for BMoSK, the A and B stream values for MTSK.
 */
inline double analytic_short_error(Scheme scheme, const BitSequence& bits, double M,
                                   const HittingProfile& profile, const NoiseParams& noise,
                                   std::span<const double> thresholds) {
    const std::size_t n = bits.size();
    if (n == 0 || n > 3)
        throw std::invalid_argument("closed forms cover messages of one to three bits");
    const bool last_one = bits.bits[n - 1] != 0;

    auto stream_stats = [&](const std::vector<std::uint8_t>& stream) {
        return received_stats(std::span<const std::uint8_t>(stream.data(), n), M, profile, noise);
    };

    switch (scheme) {
        case Scheme::kBcsk: {
            if (thresholds.size() != 1)
                throw std::invalid_argument("BCSK closed form needs one threshold");
            const auto s = stream_stats(bits.bits);
            const double z = (thresholds[0] - s.mu) / std::sqrt(s.var);
            return last_one ? phi(z) : q_function(z);
        }
        case Scheme::kBmosk: {
            // B carries the ones, A the zeros
            std::vector<std::uint8_t> sa(n), sb(n);
            for (std::size_t i = 0; i < n; ++i) {
                sb[i] = bits.bits[i];
                sa[i] = bits.bits[i] ? 0 : 1;
            }
            const auto a = stream_stats(sa);
            const auto b = stream_stats(sb);
            // decodes 1 iff C_B > C_A
            const double z = (a.mu - b.mu) / std::sqrt(a.var + b.var);
            return last_one ? q_function(-z) : q_function(z);
        }
        case Scheme::kMtsk: {
            if (thresholds.size() != 2)
                throw std::invalid_argument("MTSK closed form needs the A and B thresholds");
            auto [sa, sb] = split_streams(bits);
            const auto a = stream_stats(sa.bits);
            const auto b = stream_stats(sb.bits);
            const double both_below = phi((thresholds[0] - a.mu) / std::sqrt(a.var)) *
                                      phi((thresholds[1] - b.mu) / std::sqrt(b.var));
            return last_one ? both_below : 1.0 - both_below;
        }
    }
    throw std::logic_error("unreachable");
}

/**
 * @brief Writes ber.csv and a log-scale BER-versus-power SVG under out_dir.
 *
 * Rows keep the order of `results`; series group by (scheme, K, S).
 * Idempotent: identical results produce byte-identical files.
 */
inline void emit_report(const std::vector<BERResult>& results, const std::string& out_dir) {
    if (results.empty()) throw std::invalid_argument("no results to report");
    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / "ber.csv";
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path.string());
    out << "scheme,pbar,K,S,ber,ci_halfwidth,seed\n";
    char buf[256];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%zu,%zu,%.10g,%.10g,%llu\n", r.scheme.c_str(),
                      r.pbar, r.k_pa, r.s_dff, r.ber, r.ci_halfwidth,
                      static_cast<unsigned long long>(r.seed));
        out << buf;
    }
    out.close();

    std::vector<PlotSeries> series;
    for (const auto& r : results) {
        std::string label = r.scheme;
        if (r.k_pa > 0) label += "-pa" + std::to_string(r.k_pa);
        if (r.s_dff > 0) label += "-dff" + std::to_string(r.s_dff);
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const PlotSeries& s) { return s.label == label; });
        if (it == series.end()) {
            series.push_back({label, {}, {}});
            it = series.end() - 1;
        }
        it->x.push_back(r.pbar);
        it->y.push_back(r.ber);
    }
    write_log_plot_svg(series, "average power (molecules/slot)", "bit error rate",
                       (std::filesystem::path(out_dir) / "ber.svg").string());
}

}  // namespace mcd

#endif  // MCD_HARNESS_HPP
