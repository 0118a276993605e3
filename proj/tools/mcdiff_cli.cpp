// Command-line harness for the diffusion-link library: channel tables,
// threshold schedules, BER sweeps, and oracle cross-validation.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcd/harness.hpp"

namespace {

struct CommonOpts {
    double rr = 5.0;
    double r0 = 10.0;
    double diff_coef = 79.4;
    double ts = 0.2;
    double sigma_c2 = 1.0;
};

void add_channel_flags(CLI::App* app, CommonOpts& c) {
    app->add_option("--rr", c.rr, "receiver radius (um)");
    app->add_option("--r0", c.r0, "transmitter distance to receiver center (um)");
    app->add_option("--diff-coef", c.diff_coef, "diffusion coefficient (um^2/s)");
    app->add_option("--ts", c.ts, "symbol duration (s)");
    app->add_option("--sigma-c2", c.sigma_c2, "counting noise variance");
}

mcd::Scheme parse_scheme(const std::string& s) {
    if (s == "bcsk") return mcd::Scheme::kBcsk;
    if (s == "bmosk") return mcd::Scheme::kBmosk;
    if (s == "mtsk") return mcd::Scheme::kMtsk;
    throw CLI::ValidationError("--scheme", "unknown scheme " + s);
}

int cmd_channel(const CommonOpts& c, std::size_t k_max, const std::string& out) {
    mcd::ChannelParams cp(c.rr, c.r0, c.diff_coef, c.ts);
    const auto profile = mcd::hitting_probabilities(cp, k_max);
    std::printf("peak time: %.6g s, F_hit(inf) = %.6g, descending: %s\n", mcd::peak_time(cp),
                c.rr / c.r0, profile.descending(k_max) ? "yes" : "no");
    std::printf("%4s  %-12s  %-12s\n", "k", "p_k", "sum p_1..p_k");
    for (std::size_t k = 1; k <= k_max; ++k)
        std::printf("%4zu  %-12.6g  %-12.6g\n", k, profile.p(k), profile.partial_sum(k));
    if (!out.empty()) {
        std::ofstream f(out);
        f << "k,p_k\n";
        for (std::size_t k = 1; k <= k_max; ++k) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%zu,%.10g\n", k, profile.p(k));
            f << buf;
        }
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_threshold(const CommonOpts& c, double m, double p1, std::size_t i_exact, std::size_t n,
                  const std::string& strategy, const std::string& out) {
    mcd::ChannelParams cp(c.rr, c.r0, c.diff_coef, c.ts);
    const auto profile = mcd::hitting_probabilities(cp, std::max<std::size_t>(i_exact, 100));
    mcd::ThresholdStrategy strat = mcd::ThresholdStrategy::kPerIndex;
    if (strategy == "constant-kappa") strat = mcd::ThresholdStrategy::kConstantKappa;
    else if (strategy == "binned") strat = mcd::ThresholdStrategy::kBinned;
    else if (strategy != "per-index")
        throw CLI::ValidationError("--strategy", "unknown strategy " + strategy);
    const auto sched = mcd::threshold_schedule(m, profile, p1, mcd::NoiseParams(c.sigma_c2),
                                               i_exact, strat);
    std::printf("fit: alpha=%.6g beta=%.6g kappa=%.6g rmse=%.6g\n", sched.fit.alpha,
                sched.fit.beta, sched.fit.kappa, sched.fit.rmse);
    for (std::size_t i = 1; i <= std::min<std::size_t>(n, 20); ++i)
        std::printf("gamma*{%zu} = %.4f\n", i, sched.gamma_at(i));
    if (!out.empty()) {
        mcd::write_schedule_csv(sched, n, out);
        std::printf("wrote %s (%zu rows)\n", out.c_str(), n);
    }
    return 0;
}

int cmd_ber(const CommonOpts& c, const std::string& scheme, bool pa, std::vector<double> pbars,
            double m_opt, double p1, std::size_t n_bits, std::size_t trials, std::size_t k_mem,
            std::size_t s_mem, std::uint64_t seed, const std::string& physics,
            const std::string& out) {
    std::vector<mcd::BERResult> results;
    std::vector<std::string> schemes;
    if (scheme == "all") schemes = {"bcsk", "bmosk", "mtsk"};
    else schemes = {scheme};
    for (const auto& sname : schemes) {
        for (double pbar : pbars) {
            mcd::ExperimentConfig cfg;
            cfg.channel = mcd::ChannelParams(c.rr, c.r0, c.diff_coef, c.ts);
            cfg.noise = mcd::NoiseParams(c.sigma_c2);
            cfg.scheme = parse_scheme(sname);
            cfg.pa = pa;
            if (m_opt > 0.0) cfg.M = m_opt;
            else cfg.pbar = pbar;
            cfg.p1 = p1;
            cfg.n_bits = n_bits;
            cfg.n_trials = trials;
            cfg.k_pa = k_mem;
            cfg.s_dff = s_mem;
            cfg.seed = seed;
            cfg.physics = physics == "particle" ? mcd::Physics::kParticle : mcd::Physics::kGaussian;
            const auto r = mcd::run_ber(cfg);
            std::printf("%-6s pbar=%-8.6g K=%zu S=%zu  BER=%.6g +-%.2g  (%zu errors / %zu bits)\n",
                        r.scheme.c_str(), r.pbar, r.k_pa, r.s_dff, r.ber, r.ci_halfwidth,
                        r.n_errors, r.n_bits_total);
            results.push_back(r);
        }
    }
    if (!out.empty()) {
        mcd::emit_report(results, out);
        std::printf("wrote %s/ber.csv and %s/ber.svg\n", out.c_str(), out.c_str());
    }
    return 0;
}

int cmd_validate(const CommonOpts& c, std::size_t n, double dt, std::uint64_t seed,
                 const std::string& dump) {
    mcd::ChannelParams cp(c.rr, c.r0, c.diff_coef, c.ts);
    const double t_max = c.ts;
    mcd::SimConfig sim(dt, n, t_max, seed);
    const auto rec = mcd::simulate_release(cp, sim);
    if (!dump.empty()) {
        mcd::write_absorption_csv(rec, dump);
        std::printf("wrote %s\n", dump.c_str());
    }
    const double fhat =
        static_cast<double>(rec.absorption_times.size()) / static_cast<double>(rec.n_released);
    const double f = mcd::cumulative_hit_fraction(cp, t_max);
    const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(n));
    const double ks = mcd::ks_distance(rec, cp, t_max);
    int fails = 0;
    std::printf("F_hat(%.3g) = %.5f vs F_hit = %.5f (|diff| = %.5f, 3 sigma = %.5f)  [%s]\n",
                t_max, fhat, f, std::abs(fhat - f), 3.0 * se,
                std::abs(fhat - f) <= 3.0 * se ? "ok" : "FAIL");
    fails += std::abs(fhat - f) > 3.0 * se;
    std::printf("KS distance = %.5f (< 0.01)  [%s]\n", ks, ks < 0.01 ? "ok" : "FAIL");
    fails += !(ks < 0.01);

    // slot fractions against the closed-form hitting probabilities
    const auto profile = mcd::hitting_probabilities(cp, 1);
    const auto counts = mcd::slot_counts(rec, c.ts, 1);
    const double p1hat = static_cast<double>(counts[0]) / static_cast<double>(n);
    const double se1 = std::sqrt(profile.p(1) * (1 - profile.p(1)) / static_cast<double>(n));
    std::printf("slot-1 fraction = %.5f vs p_1 = %.5f (3 sigma = %.5f)  [%s]\n", p1hat,
                profile.p(1), 3.0 * se1, std::abs(p1hat - profile.p(1)) <= 3.0 * se1 ? "ok" : "FAIL");
    fails += std::abs(p1hat - profile.p(1)) > 3.0 * se1;
    return fails == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion molecular-communication link: channel, thresholds, BER harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "plain-text key=value config file; flags override it");

    CommonOpts copt;

    auto* channel = app.add_subcommand("channel", "print the slot hitting-probability table");
    add_channel_flags(channel, copt);
    std::size_t k_max = 20;
    std::string channel_out;
    channel->add_option("--k-max", k_max, "slots to print");
    channel->add_option("--out", channel_out, "also write k,p_k CSV here");

    auto* threshold = app.add_subcommand("threshold", "compute a threshold schedule, emit CSV");
    add_channel_flags(threshold, copt);
    double th_m = 100.0, th_p1 = 0.5;
    std::size_t th_iexact = 20, th_n = 200;
    std::string th_strategy = "per-index", th_out;
    threshold->add_option("--m", th_m, "molecules per 1");
    threshold->add_option("--p1", th_p1, "prior P[b=1]");
    threshold->add_option("--i-exact", th_iexact, "exact thresholds before the fit takes over");
    threshold->add_option("--n", th_n, "schedule length to emit");
    threshold->add_option("--strategy", th_strategy, "per-index | constant-kappa | binned");
    threshold->add_option("--out", th_out, "schedule CSV path");

    auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
    add_channel_flags(ber, copt);
    std::string ber_scheme = "all", ber_physics = "gaussian", ber_out;
    bool ber_pa = false;
    std::vector<double> ber_pbars{60.0, 90.0, 150.0};
    double ber_m = -1.0, ber_p1 = 0.5;
    std::size_t ber_nbits = 1000, ber_trials = 100, ber_kmem = 4, ber_smem = 0;
    std::uint64_t ber_seed = 1;
    ber->add_option("--scheme", ber_scheme, "bcsk | bmosk | mtsk | all");
    ber->add_flag("--pa", ber_pa, "enable power adjustment");
    ber->add_option("--pbar", ber_pbars, "average power points (molecules/slot)");
    ber->add_option("--m", ber_m, "molecules per 1 (overrides --pbar)");
    ber->add_option("--p1", ber_p1, "prior P[b=1]");
    ber->add_option("--n-bits", ber_nbits, "bits per trial");
    ber->add_option("--trials", ber_trials, "base trial count");
    ber->add_option("--k-mem", ber_kmem, "PA residual memory");
    ber->add_option("--s-mem", ber_smem, "DFF memory (BCSK only; 0 = threshold detector)");
    ber->add_option("--seed", ber_seed, "master seed");
    ber->add_option("--physics", ber_physics, "gaussian | particle");
    ber->add_option("--out", ber_out, "directory for ber.csv and ber.svg");

    auto* validate = app.add_subcommand("validate", "particle-sim oracle cross-checks");
    add_channel_flags(validate, copt);
    std::size_t va_n = 100000;
    double va_dt = 1e-4;
    std::uint64_t va_seed = 7;
    std::string va_dump;
    validate->add_option("--n", va_n, "molecules");
    validate->add_option("--dt", va_dt, "integration step (s)");
    validate->add_option("--seed", va_seed, "seed");
    validate->add_option("--dump", va_dump, "write absorption-time CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (channel->parsed()) return cmd_channel(copt, k_max, channel_out);
        if (threshold->parsed())
            return cmd_threshold(copt, th_m, th_p1, th_iexact, th_n, th_strategy, th_out);
        if (ber->parsed())
            return cmd_ber(copt, ber_scheme, ber_pa, ber_pbars, ber_m, ber_p1, ber_nbits,
                           ber_trials, ber_kmem, ber_smem, ber_seed, ber_physics, ber_out);
        if (validate->parsed()) return cmd_validate(copt, va_n, va_dt, va_seed, va_dump);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
