#include <doctest.h>

#include <cmath>

#include "leocov/geometry.hpp"
#include "leocov/visibility.hpp"
#include <initializer_list>
#include <stdexcept>

using namespace leocov;

namespace {
const GeometryParams kGeom = GeometryParams::from_km(6371.0, 1200.0);
const NetworkParams kNet{720.0, 20};
} // namespace

TEST_SUITE("visibility") {

TEST_CASE("interferer visibility probability") {
    CHECK(prob_visible_interferer(kGeom, kGeom.max_range_m()) == 0.0);
    CHECK(prob_visible_interferer(kGeom, kGeom.altitude_m) ==
          doctest::Approx(0.07924976885484).epsilon(1e-12));
    CHECK(prob_visible_interferer(kGeom, kGeom.max_range_m() + 1e5) == 0.0);
}

TEST_CASE("visibility probability equals the conditional cdf ratio") {
    const double f_max = cdf_any_distance(kGeom, kGeom.max_range_m());
    for (int i = 0; i <= 50; ++i) {
        const double r0 =
            kGeom.altitude_m + (kGeom.max_range_m() - kGeom.altitude_m) * i / 50.0;
        const double f0 = cdf_any_distance(kGeom, r0);
        const double expected = (f_max - f0) / (1.0 - f0);
        CHECK(prob_visible_interferer(kGeom, r0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("visibility probability strictly decreases with the serving distance") {
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double r0 =
            kGeom.altitude_m + (kGeom.max_range_m() - kGeom.altitude_m) * i / 200.0;
        const double p = prob_visible_interferer(kGeom, r0);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("zero-interference probability") {
    CHECK(prob_zero_interference(kGeom, kNet, kGeom.max_range_m() + 1.0) == 1.0);
    CHECK(prob_zero_interference(kGeom, NetworkParams{720.0, 720}, 1.5e6) == 1.0);
    CHECK(prob_zero_interference(kGeom, kNet, kGeom.altitude_m) ==
          doctest::Approx(0.0555858536090).epsilon(1e-10));
}

TEST_CASE("zero-interference probability is monotone in distance and channels") {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r0 =
            kGeom.altitude_m + (kGeom.max_range_m() - kGeom.altitude_m) * i / 100.0;
        const double p = prob_zero_interference(kGeom, kNet, r0);
        CHECK(p >= prev);
        prev = p;
    }
    double prev_k = 0.0;
    for (int k : {10, 20, 40, 720}) {
        const double p = prob_zero_interference(kGeom, NetworkParams{720.0, k}, 1.4e6);
        CHECK(p >= prev_k);
        prev_k = p;
    }
}

TEST_CASE("interferer-count distribution") {
    const double r0 = kGeom.altitude_m;
    CHECK(pmf_num_interferers(kGeom, kNet, r0, 0) ==
          doctest::Approx(prob_zero_interference(kGeom, kNet, r0)).epsilon(1e-12));
    CHECK(pmf_num_interferers(kGeom, kNet, r0, 2) ==
          doctest::Approx(0.2450155118945).epsilon(1e-10));

    double total = 0.0;
    for (int n = 0; n <= 35; ++n) total += pmf_num_interferers(kGeom, kNet, r0, n);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(pmf_num_interferers(kGeom, kNet, r0, -1) == 0.0);
    CHECK(pmf_num_interferers(kGeom, kNet, r0, 36) == 0.0);
    CHECK_THROWS_AS(pmf_num_interferers(kGeom, NetworkParams{720.0, 77}, r0, 1),
                    std::domain_error);
}

TEST_CASE("network parameter validation") {
    CHECK_THROWS_AS(NetworkParams(720.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(NetworkParams(10.0, 20), std::invalid_argument);
    CHECK(NetworkParams(720.0, 20).integral_group());
    CHECK_FALSE(NetworkParams(720.0, 77).integral_group());
}

} // TEST_SUITE
