#ifndef MCD_THRESHOLD_HPP
#define MCD_THRESHOLD_HPP

/**
 * @file threshold.hpp
 * @brief Optimal decision thresholds for ISI-distorted molecule counts.
 *
 * Three layers:
 *  - pairwise_threshold: closed-form MAP crossing of two Gaussians
 *    (quadratic in the threshold).
 *  - optimal_threshold: the memoryless per-index optimum, found by a
 *    shrinking-grid fixed-point search over all candidate histories and
 *    polished by bisection until the likelihood balance residual is tiny.
 *  - fit_threshold_curve / threshold_schedule: power-law extrapolation
 *    gamma_i = alpha i^beta + kappa (-1 < beta < 0) past the enumeration cap.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcd/gauss.hpp"
#include "mcd/isi.hpp"

namespace mcd {

/**
 * @brief MAP threshold between two prior-weighted Gaussian hypotheses.
 *
 * Solves a g^2 + b g + c = 0 with
 *   a = var1 - var0,
 *   b = 2 (var0 mu1 - var1 mu0),
 *   c = var1 mu0^2 - var0 mu1^2 - 2 var1 var0 log(prior0 sigma1 / (prior1 sigma0)),
 * returning the positive root (-b + sqrt(b^2 - 4ac)) / (2a). Equal variances
 * collapse the quadratic to the linear crossing -c / b.
 */
inline double pairwise_threshold(const GaussianStats& stats0, const GaussianStats& stats1,
                                 double prior0, double prior1) {
    if (!(stats1.mu > stats0.mu))
        throw std::invalid_argument("hypothesis 1 must have the larger mean");
    if (!(prior0 > 0.0) || !(prior1 > 0.0))
        throw std::invalid_argument("priors must be positive");
    const double v0 = stats0.var, v1 = stats1.var;
    const double m0 = stats0.mu, m1 = stats1.mu;
    const double a = v1 - v0;
    const double b = 2.0 * (v0 * m1 - v1 * m0);
    const double c = v1 * m0 * m0 - v0 * m1 * m1 -
                     2.0 * v1 * v0 * std::log(prior0 * std::sqrt(v1) / (prior1 * std::sqrt(v0)));
    if (std::abs(a) < 1e-12 * std::max(v0, v1)) {
        return -c / b;  // equal variances: symmetric linear crossing
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
        throw std::domain_error("prior-weighted densities do not cross (negative discriminant)");
    return (-b + std::sqrt(disc)) / (2.0 * a);
}

/**
 * @brief Total error probability J_i(gamma) over two candidate lists.
 *
 * J = sum_j w0_j Q((gamma - mu0_j)/sigma0_j) + w1_j Q((mu1_j - gamma)/sigma1_j)
 * where the weights are history prior times conditioning-bit prior.
 */
inline double error_objective(double gamma, const std::vector<CandidateSeq>& candidates0,
                              const std::vector<CandidateSeq>& candidates1) {
    double j = 0.0;
    for (const auto& c : candidates0)
        j += c.weight * q_function((gamma - c.stats.mu) / std::sqrt(c.stats.var));
    for (const auto& c : candidates1)
        j += c.weight * q_function((c.stats.mu - gamma) / std::sqrt(c.stats.var));
    return j;
}

namespace detail {

/// Prior-weighted likelihood balance LHS - RHS of the stationarity condition.
/// Zero where the summed `1`-side and `0`-side densities cross.
inline double likelihood_balance(double gamma, const CandidateLevel& lvl, double M,
                                 double p1_prior, const HittingProfile& profile,
                                 const NoiseParams& noise) {
    const double p1 = profile.p(1);
    const double mu_step = M * p1;
    const double var_step = M * p1 * (1.0 - p1);
    double lhs = 0.0, rhs = 0.0;
    const std::size_t n = lvl.isi_mu.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double v0 = noise.sigma_c2 + lvl.isi_var[j];
        const double v1 = v0 + var_step;
        const double m0 = lvl.isi_mu[j];
        const double m1 = m0 + mu_step;
        const double e0 = (gamma - m0) * (gamma - m0) / (2.0 * v0);
        const double e1 = (gamma - m1) * (gamma - m1) / (2.0 * v1);
        if (e1 < 45.0) lhs += lvl.prob[j] * std::exp(-e1) / std::sqrt(2.0 * kPi * v1);
        if (e0 < 45.0) rhs += lvl.prob[j] * std::exp(-e0) / std::sqrt(2.0 * kPi * v0);
    }
    return p1_prior * lhs - (1.0 - p1_prior) * rhs;
}

/// Shrinking-grid search (steps 0.1 down to 1e-4) followed by bisection.
inline double fixed_point_search(const CandidateLevel& lvl, double M, double p1_prior,
                                 const HittingProfile& profile, const NoiseParams& noise,
                                 double lo, double hi) {
    auto bal = [&](double g) { return likelihood_balance(g, lvl, M, p1_prior, profile, noise); };

    const double eps = 1e-9 * (hi - lo);
    if (!(bal(lo + eps) < 0.0) || !(bal(hi - eps) > 0.0))
        throw std::domain_error("no stationary point inside threshold bracket (" +
                                std::to_string(lo) + ", " + std::to_string(hi) + ")");

    double step = 0.1;
    double best = lo;
    {
        double best_val = std::abs(bal(lo));
        for (double g = lo; g <= hi + 0.5 * step; g += step) {
            const double gc = std::min(g, hi);
            const double v = std::abs(bal(gc));
            if (v < best_val) {
                best_val = v;
                best = gc;
            }
        }
    }
    while (step >= 1e-4) {
        const double fine = step / 10.0;
        double best_val = std::abs(bal(best));
        const double a = best - step, b = best + step;
        for (double g = a; g <= b + 0.5 * fine; g += fine) {
            const double v = std::abs(bal(g));
            if (v < best_val) {
                best_val = v;
                best = g;
            }
        }
        step = fine;
    }

    // bisection polish so the balance residual is far below the grid step
    double a = best - 2e-4, b = best + 2e-4;
    double fa = bal(a), fb = bal(b);
    int widen = 0;
    while (fa * fb > 0.0 && widen < 12) {
        a -= 2e-4 * (1 << widen);
        b += 2e-4 * (1 << widen);
        a = std::max(a, lo);
        b = std::min(b, hi);
        fa = bal(a);
        fb = bal(b);
        ++widen;
    }
    if (fa * fb > 0.0) return best;
    for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = bal(m);
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/**
 * @brief Memoryless optimal thresholds gamma*{1}..gamma*{i_max}.
 *
 * gamma*{1} is the closed-form pairwise threshold; each later gamma*{i} is the
 * stationary point of the error objective over all 2^(i-1) candidate
 * histories, bracketed by (gamma*{i-1}, pairwise threshold of the all-ones
 * sibling pair).
 */
inline std::vector<double> threshold_chain(std::size_t i_max, double M,
                                           const HittingProfile& profile, double p1_prior,
                                           const NoiseParams& noise) {
    if (i_max < 1) throw std::invalid_argument("need at least one threshold");
    if (i_max > kEnumerationCap)
        throw std::domain_error("index above enumeration cap; use the fitted curve");
    if (!profile.descending(std::min<std::size_t>(profile.size(), i_max)))
        throw std::invalid_argument("hitting probabilities must be descending");
    if (!(p1_prior > 0.0 && p1_prior < 1.0))
        throw std::invalid_argument("prior must be in (0, 1)");

    std::vector<double> gammas;
    gammas.reserve(i_max);
    detail::CandidateLevel lvl;  // level 1: empty history
    const auto s0 = lvl.stats(0, 0, M, profile, noise);
    const auto s1 = lvl.stats(0, 1, M, profile, noise);
    gammas.push_back(pairwise_threshold(s0, s1, 1.0 - p1_prior, p1_prior));
    for (std::size_t i = 2; i <= i_max; ++i) {
        lvl.grow(M, p1_prior, profile);
        const std::size_t last = lvl.isi_mu.size() - 1;
        const double gmax =
            pairwise_threshold(lvl.stats(last, 0, M, profile, noise),
                               lvl.stats(last, 1, M, profile, noise), 1.0 - p1_prior, p1_prior);
        gammas.push_back(
            detail::fixed_point_search(lvl, M, p1_prior, profile, noise, gammas.back(), gmax));
    }
    return gammas;
}

/// gamma*{i} alone (computes the chain up to i).
inline double optimal_threshold(std::size_t i, double M, const HittingProfile& profile,
                                double p1_prior, const NoiseParams& noise) {
    return threshold_chain(i, M, profile, p1_prior, noise).back();
}

/// Result of the power-law fit gamma_i = alpha i^beta + kappa.
struct ThresholdFit {
    double alpha;
    double beta;
    double kappa;
    double rmse;

    double operator()(double i) const { return alpha * std::pow(i, beta) + kappa; }
};

/**
 * @brief Damped least-squares fit of gamma_i = alpha i^beta + kappa.
 *
 * beta is box-constrained to (-1, 0) by projection. Initialization:
 * kappa0 = max gamma, beta0 = -0.5, alpha0 from the first point.
 */
inline ThresholdFit fit_threshold_curve(const std::vector<std::pair<double, double>>& points) {
    const std::size_t n = points.size();
    if (n < 5) throw std::invalid_argument("need at least five points to fit");
    for (std::size_t k = 1; k < n; ++k)
        if (!(points[k].second > points[k - 1].second))
            throw std::invalid_argument("threshold sequence must be increasing to fit");

    const double beta_lo = -1.0 + 1e-9, beta_hi = -1e-9;
    double kappa = points[0].second;
    for (const auto& pt : points) kappa = std::max(kappa, pt.second);
    double beta = -0.5;
    double alpha = (points[0].second - kappa) / std::pow(points[0].first, beta);

    auto sse = [&](double a, double b, double k) {
        double s = 0.0;
        for (const auto& pt : points) {
            const double r = a * std::pow(pt.first, b) + k - pt.second;
            s += r * r;
        }
        return s;
    };

    double lambda = 1e-3;
    double cost = sse(alpha, beta, kappa);
    for (int it = 0; it < 500; ++it) {
        // accumulate J^T J and J^T r for residual r = a i^b + k - gamma
        double h[3][3] = {};
        double g[3] = {};
        for (const auto& pt : points) {
            const double ib = std::pow(pt.first, beta);
            const double r = alpha * ib + kappa - pt.second;
            const double jr[3] = {ib, alpha * ib * std::log(pt.first), 1.0};
            for (int u = 0; u < 3; ++u) {
                g[u] += jr[u] * r;
                for (int v = 0; v < 3; ++v) h[u][v] += jr[u] * jr[v];
            }
        }
        double m[3][4];
        for (int u = 0; u < 3; ++u) {
            for (int v = 0; v < 3; ++v) m[u][v] = h[u][v];
            m[u][u] += lambda * std::max(h[u][u], 1e-12);
            m[u][3] = -g[u];
        }
        // 3x3 Gaussian elimination with partial pivoting
        bool singular = false;
        for (int col = 0; col < 3 && !singular; ++col) {
            int piv = col;
            for (int row = col + 1; row < 3; ++row)
                if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
            if (std::abs(m[piv][col]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(m[piv], m[col]);
            for (int row = col + 1; row < 3; ++row) {
                const double f = m[row][col] / m[col][col];
                for (int v = col; v < 4; ++v) m[row][v] -= f * m[col][v];
            }
        }
        if (singular) break;
        double delta[3];
        for (int row = 2; row >= 0; --row) {
            double s = m[row][3];
            for (int v = row + 1; v < 3; ++v) s -= m[row][v] * delta[v];
            delta[row] = s / m[row][row];
        }
        double na = alpha + delta[0];
        double nb = std::clamp(beta + delta[1], beta_lo, beta_hi);
        double nk = kappa + delta[2];
        const double nc = sse(na, nb, nk);
        if (nc < cost) {
            const double moved = std::abs(na - alpha) + std::abs(nb - beta) + std::abs(nk - kappa);
            alpha = na;
            beta = nb;
            kappa = nk;
            const bool converged = (cost - nc) < 1e-15 * (1.0 + cost) && moved < 1e-10;
            cost = nc;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (converged) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {alpha, beta, kappa, std::sqrt(cost / static_cast<double>(n))};
}

/// How a ThresholdSchedule materializes per-index values.
enum class ThresholdStrategy {
    kPerIndex,       ///< exact for i <= i_exact, fitted curve beyond
    kConstantKappa,  ///< per-index up to the burn-in, kappa afterwards
    kBinned,         ///< per-index up to i_exact, then doubling-width bins of the fitted curve
};

/**
 * @brief Exact thresholds up to an index plus the fitted extrapolation curve.
 */
struct ThresholdSchedule {
    std::vector<double> gammas;  ///< exact gamma*{i} for i = 1..i_exact
    ThresholdFit fit;
    ThresholdStrategy strategy = ThresholdStrategy::kPerIndex;
    std::size_t burn_in = 100;  ///< used by the constant-kappa strategy

    double gamma_at(std::size_t i) const {
        if (i == 0) throw std::invalid_argument("symbol index is 1-based");
        switch (strategy) {
            case ThresholdStrategy::kConstantKappa:
                if (i > burn_in) return fit.kappa;
                break;
            case ThresholdStrategy::kBinned:
                if (i > gammas.size()) {
                    // doubling-width bins anchored past the exact range, value at
                    // the bin's geometric midpoint
                    double lo = static_cast<double>(gammas.size()) + 1.0;
                    double width = 16.0;
                    while (i > static_cast<std::size_t>(lo + width - 1.0)) {
                        lo += width;
                        width *= 2.0;
                    }
                    return fit(std::sqrt(lo * (lo + width - 1.0)));
                }
                break;
            case ThresholdStrategy::kPerIndex:
                break;
        }
        if (i <= gammas.size()) return gammas[i - 1];
        return fit(static_cast<double>(i));
    }

    std::vector<double> materialize(std::size_t n) const {
        std::vector<double> out(n);
        for (std::size_t i = 1; i <= n; ++i) out[i - 1] = gamma_at(i);
        return out;
    }
};

/**
 * @brief Builds the full schedule: exact chain to i_exact, curve fit beyond.
 */
inline ThresholdSchedule threshold_schedule(double M, const HittingProfile& profile,
                                            double p1_prior, const NoiseParams& noise,
                                            std::size_t i_exact,
                                            ThresholdStrategy strategy = ThresholdStrategy::kPerIndex,
                                            std::size_t burn_in = 100) {
    ThresholdSchedule sched;
    sched.strategy = strategy;
    sched.burn_in = burn_in;
    sched.gammas = threshold_chain(i_exact, M, profile, p1_prior, noise);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(i_exact);
    for (std::size_t i = 1; i <= i_exact; ++i)
        pts.emplace_back(static_cast<double>(i), sched.gammas[i - 1]);
    sched.fit = fit_threshold_curve(pts);
    if (sched.fit.kappa < sched.gammas.back() - 3.0 * sched.fit.rmse)
        throw std::runtime_error("fitted kappa fell below the computed thresholds");
    return sched;
}

/// CSV with a comment header carrying the fit, then `i,gamma` rows.
inline void write_schedule_csv(const ThresholdSchedule& sched, std::size_t n,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[160];
    std::snprintf(buf, sizeof buf, "# alpha=%.10g beta=%.10g kappa=%.10g rmse=%.10g\n",
                  sched.fit.alpha, sched.fit.beta, sched.fit.kappa, sched.fit.rmse);
    out << buf << "i,gamma\n";
    for (std::size_t i = 1; i <= n; ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g\n", i, sched.gamma_at(i));
        out << buf;
    }
}

}  // namespace mcd

#endif  // MCD_THRESHOLD_HPP
