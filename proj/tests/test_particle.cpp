#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mcd/particle.hpp"

using namespace mcd;

namespace {
ChannelParams reference() { return ChannelParams(5.0, 10.0, 79.4, 0.2); }
}

TEST_CASE("sim config rejects bad values") {
    CHECK_THROWS_AS(SimConfig(0.0, 10, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(SimConfig(1e-4, 0, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(SimConfig(1e-4, 10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("near-zero diffusion means no absorptions") {
    ChannelParams cp(5.0, 10.0, 1e-9, 0.2);
    const auto rec = simulate_release(cp, SimConfig(1e-3, 1, 0.2, 42));
    CHECK(rec.absorption_times.empty());
    CHECK(rec.n_released == 1);
}

TEST_CASE("absorbed fraction tracks the closed form") {
    const auto cp = reference();
    // 2e4 molecules keeps this test quick; the full 1e5 run lives in acceptance
    SimConfig sim(1e-4, 20000, 0.2, 20240809);
    const auto rec = simulate_release(cp, sim);
    const double fhat =
        static_cast<double>(rec.absorption_times.size()) / static_cast<double>(rec.n_released);
    const double f = cumulative_hit_fraction(cp, 0.2);
    const double sigma = std::sqrt(f * (1.0 - f) / 20000.0);
    CHECK(std::abs(fhat - f) < 3.0 * sigma);

    for (double t : rec.absorption_times) {
        REQUIRE(t > 0.0);
        REQUIRE(t <= 0.2 + 1e-12);
    }
}

TEST_CASE("slot fractions reproduce the worked-example hitting probabilities") {
    const auto cp = reference();
    SimConfig sim(1e-4, 20000, 0.4, 7);
    const auto rec = simulate_release(cp, sim);
    const auto counts = slot_counts(rec, 0.2, 2);
    const double n = 20000.0;
    const double s1 = std::sqrt(0.1875 * (1 - 0.1875) / n);
    const double s2 = std::sqrt(0.0777 * (1 - 0.0777) / n);
    CHECK(std::abs(counts[0] / n - 0.1875) < 3.0 * s1);
    CHECK(std::abs(counts[1] / n - 0.0777) < 3.0 * s2);
}

TEST_CASE("slot counts bin boundaries and empty records") {
    AbsorptionRecord rec;
    rec.n_released = 4;
    CHECK(slot_counts(rec, 0.2, 3) == std::vector<std::size_t>{0, 0, 0});
    rec.absorption_times = {0.05, 0.2, 0.2000000001, 0.35};
    const auto c = slot_counts(rec, 0.2, 2);
    CHECK(c[0] == 2);  // (0, 0.2] inclusive of the boundary
    CHECK(c[1] == 2);
    // all within the first slot
    AbsorptionRecord early;
    early.n_released = 3;
    early.absorption_times = {0.01, 0.1, 0.19};
    CHECK(slot_counts(early, 0.2, 1)[0] == 3);
}

TEST_CASE("identical seeds give identical records") {
    const auto cp = reference();
    SimConfig sim(2e-3, 500, 0.2, 99);
    const auto a = simulate_release(cp, sim);
    const auto b = simulate_release(cp, sim);
    REQUIRE(a.absorption_times == b.absorption_times);
    SimConfig other(2e-3, 500, 0.2, 100);
    CHECK(simulate_release(cp, other).absorption_times != a.absorption_times);
}

TEST_CASE("step halving moves the estimate less than one binomial sigma") {
    const auto cp = reference();
    const std::size_t n = 100000;
    const auto coarse = simulate_release(cp, SimConfig(1e-4, n, 0.2, 5));
    const auto fine = simulate_release(cp, SimConfig(5e-5, n, 0.2, 5));
    const double fc = static_cast<double>(coarse.absorption_times.size()) / n;
    const double ff = static_cast<double>(fine.absorption_times.size()) / n;
    const double sigma = std::sqrt(0.1875 * (1 - 0.1875) / n);
    CHECK(std::abs(fc - ff) < sigma);
}

TEST_CASE("boundary-only absorption undercounts, bridge correction does not") {
    const auto cp = reference();
    SimConfig plain(1e-3, 40000, 0.2, 11);
    plain.absorption = AbsorptionModel::kBoundaryOnly;
    SimConfig bridged(1e-3, 40000, 0.2, 11);
    const double f = cumulative_hit_fraction(cp, 0.2);
    const double fp =
        static_cast<double>(simulate_release(cp, plain).absorption_times.size()) / 40000.0;
    const double fb =
        static_cast<double>(simulate_release(cp, bridged).absorption_times.size()) / 40000.0;
    // at dt = 1e-3 the boundary-only bias is around -0.017, far beyond noise
    CHECK(f - fp > 0.01);
    CHECK(std::abs(fb - f) < 0.006);
}

TEST_CASE("absorption CSV dump") {
    AbsorptionRecord rec;
    rec.n_released = 2;
    rec.absorption_times = {0.0125, 0.1875};
    const auto path = std::filesystem::temp_directory_path() / "mcd_absorption_test.csv";
    write_absorption_csv(rec, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "absorption_time_s");
    std::getline(in, line);
    CHECK(line == "0.0125");
    std::filesystem::remove(path);
}
