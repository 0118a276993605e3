#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "mcd/channel.hpp"

using namespace mcd;

namespace {

// reference link from the worked examples: insulin-like molecules in water
ChannelParams reference(double ts = 0.2) { return ChannelParams(5.0, 10.0, 79.4, ts); }

// adaptive Simpson quadrature, test-side oracle independent of the closed form
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
               double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
           simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fb, fm, eps, 40);
}

}  // namespace

TEST_CASE("channel parameters validate on construction") {
    CHECK_THROWS_AS(ChannelParams(0.0, 10, 79.4, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(5, 5, 79.4, 0.2), std::invalid_argument);   // source on surface
    CHECK_THROWS_AS(ChannelParams(5, 4, 79.4, 0.2), std::invalid_argument);   // source inside
    CHECK_THROWS_AS(ChannelParams(5, 10, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(5, 10, 79.4, 0.0), std::invalid_argument);
}

TEST_CASE("cumulative hit fraction matches the worked example") {
    const auto cp = reference();
    CHECK(cumulative_hit_fraction(cp, 0.2) == Catch::Approx(0.1875).margin(1e-4));
    CHECK(cumulative_hit_fraction(cp, 0.2) == Catch::Approx(0.18748109426540482).epsilon(1e-12));
    CHECK(cumulative_hit_fraction(cp, 0.0) == 0.0);
    // limit: erfc(0) = 1 forces rr/r0
    CHECK(cumulative_hit_fraction(cp, 1e15) == Catch::Approx(0.5).margin(1e-8));
}

TEST_CASE("cumulative hit fraction is monotone and bounded") {
    const auto cp = reference();
    double prev = 0.0;
    for (double t = 1e-3; t <= 10.0; t *= 1.15) {
        const double f = cumulative_hit_fraction(cp, t);
        CHECK(f >= prev);
        CHECK(f <= 0.5);
        prev = f;
    }
}

TEST_CASE("hitting rate integrates to the cumulative fraction") {
    const auto cp = reference();
    auto f = [&](double t) { return t <= 0.0 ? 0.0 : hitting_rate(cp, t); };
    for (double t : {1e-3, 0.05, 0.2, 1.0, 10.0}) {
        const double q = integrate(f, 1e-12, t, 1e-10);
        CHECK(q == Catch::Approx(cumulative_hit_fraction(cp, t)).margin(1e-6));
    }
}

TEST_CASE("hitting rate peaks near the derived peak time") {
    const auto cp = reference();
    CHECK(peak_time(cp) == Catch::Approx(25.0 / (6.0 * 79.4)).epsilon(1e-12));
    CHECK(peak_time(cp) == Catch::Approx(0.052).margin(1e-3));  // the ~52 ms pulse peak
    // argmax by golden-section over a bracket
    double a = 1e-3, b = 0.5;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    while (b - a > 1e-7) {
        const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        if (hitting_rate(cp, x1) < hitting_rate(cp, x2)) a = x1;
        else b = x2;
    }
    CHECK(0.5 * (a + b) == Catch::Approx(peak_time(cp)).margin(1e-4));
    CHECK_THROWS_AS(hitting_rate(cp, 0.0), std::domain_error);
    CHECK(hitting_rate(cp, 1e-6) == Catch::Approx(0.0).margin(1e-30));
}

TEST_CASE("peak time scales inversely with the diffusion coefficient") {
    const auto cp = reference();
    ChannelParams faster(5.0, 10.0, 2.0 * 79.4, 0.2);
    CHECK(peak_time(faster) == Catch::Approx(0.5 * peak_time(cp)).epsilon(1e-12));
}

TEST_CASE("hitting probabilities match the worked example") {
    const auto profile = hitting_probabilities(reference(), 3);
    CHECK(profile.p(1) == Catch::Approx(0.1875).margin(1e-4));
    CHECK(profile.p(2) == Catch::Approx(0.0777).margin(1e-4));
    // p_3 frozen from numerical quadrature of the hitting rate over [0.4, 0.6]
    CHECK(profile.p(3) == Catch::Approx(0.0390307062).margin(1e-8));
}

TEST_CASE("hitting probability partial sums telescope exactly") {
    const auto cp = reference();
    const auto profile = hitting_probabilities(cp, 50);
    for (std::size_t k = 1; k <= 50; ++k) {
        CHECK(profile.partial_sum(k) ==
              cumulative_hit_fraction(cp, static_cast<double>(k) * 0.2));  // bitwise
    }
    // and the p_k themselves stay within one ulp-scale rounding of the sums
    double s = 0.0;
    for (std::size_t k = 1; k <= 50; ++k) s += profile.p(k);
    CHECK(s == Catch::Approx(profile.partial_sum(50)).epsilon(1e-13));
}

TEST_CASE("symbol duration validation detects non-descending profiles") {
    CHECK(validate_symbol_duration(reference(0.2), 20));
    // slot far below the pulse peak: the first slot ends before most molecules arrive
    CHECK_FALSE(validate_symbol_duration(reference(0.01), 2));
    const auto early = hitting_probabilities(reference(0.01), 2);
    CHECK(early.p(1) < early.p(2));
    // k_max = 2 equals a direct comparison
    const auto p2 = hitting_probabilities(reference(0.2), 2);
    CHECK(validate_symbol_duration(reference(0.2), 2) == (p2.p(1) > p2.p(2)));
}
