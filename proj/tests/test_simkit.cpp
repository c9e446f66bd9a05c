#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "leocov/simkit.hpp"
#include "leocov/visibility.hpp"

using namespace leocov;

namespace {
const GeometryParams kGeom = GeometryParams::from_km(6371.0, 1200.0);
}

TEST_SUITE("simkit") {

TEST_CASE("trial streams are reproducible and distinct") {
    TrialRng a(42, 3, 1000), b(42, 3, 1000), c(42, 3, 1001), d(43, 3, 1000);
    bool all_equal = true, trial_differs = false, seed_differs = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        trial_differs = trial_differs || (va != c.next_u64());
        seed_differs = seed_differs || (va != d.next_u64());
    }
    CHECK(all_equal);
    CHECK(trial_differs);
    CHECK(seed_differs);
}

TEST_CASE("sphere sampling is uniform") {
    TrialRng rng(7, 0, 0);
    const int n = 200000;
    const auto pts = sample_bpp(n, kGeom, rng);
    const double radius = kGeom.orbit_radius_m();
    double sx = 0.0, sy = 0.0, sz = 0.0;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(std::sqrt(dot(pts[i], pts[i])) - radius) < radius * 1e-9);
        sx += pts[i].x;
        sy += pts[i].y;
        sz += pts[i].z;
        z[i] = pts[i].z / radius;
    }
    // Coordinate means vanish within four standard errors (std ~ r/sqrt(3)).
    const double bound = 4.0 * radius / std::sqrt(3.0 * n);
    CHECK(std::abs(sx / n) < bound);
    CHECK(std::abs(sy / n) < bound);
    CHECK(std::abs(sz / n) < bound);
    // Height above the equatorial plane is uniform on the sphere.
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = 0.5 * (z[i] + 1.0);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n))); // 1% critical value
}

TEST_CASE("delta-pattern layout") {
    WalkerParams wp{90.0, 20, 36, 1, 1200e3};
    const auto pts = generate_walker(wp, 0.0, 0.0, kGeom.earth_radius_m);
    REQUIRE(static_cast<int>(pts.size()) == wp.total());
    const double radius = kGeom.orbit_radius_m();
    for (const auto& p : pts) {
        CHECK(std::abs(std::sqrt(dot(p, p)) - radius) < radius * 1e-12);
    }
    // Polar planes contain the pole axis: plane normals stay equatorial.
    for (int plane = 0; plane < wp.n_planes; ++plane) {
        const Vec3& p0 = pts[plane * wp.sats_per_plane];
        const Vec3& p1 = pts[plane * wp.sats_per_plane + 7];
        const Vec3 normal{p0.y * p1.z - p0.z * p1.y, p0.z * p1.x - p0.x * p1.z,
                          p0.x * p1.y - p0.y * p1.x};
        const double len = std::sqrt(dot(normal, normal));
        CHECK(std::abs(normal.z) < len * 1e-9);
    }
    // Even in-plane spacing.
    for (int q = 0; q + 1 < wp.sats_per_plane; ++q) {
        const Vec3& a = pts[q];
        const Vec3& b = pts[q + 1];
        const double cosang = dot(a, b) / (radius * radius);
        CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) ==
              doctest::Approx(2.0 * std::numbers::pi / wp.sats_per_plane).epsilon(1e-9));
    }
}

TEST_CASE("orbit latitude density concentrates at the inclination limit") {
    // sin(lat) = sin(i) sin(u) with uniform phase, so sin-latitude follows the
    // arcsine law with density proportional to 1/sqrt(sin^2 i - sin^2 lat).
    WalkerParams wp{53.0, 18, 40, 1, 1200e3};
    long low_bin = 0, high_bin = 0; // |sin lat| in [0, 0.1) and [0.45, 0.55)
    for (int trial = 0; trial < 400; ++trial) {
        TrialRng rng(11, 0, static_cast<std::uint64_t>(trial));
        const double raan = 2.0 * std::numbers::pi * rng.uniform();
        const double anomaly = 2.0 * std::numbers::pi * rng.uniform();
        const auto pts = generate_walker(wp, raan, anomaly, kGeom.earth_radius_m);
        for (const auto& p : pts) {
            const double z = std::abs(p.z) / kGeom.orbit_radius_m();
            if (z < 0.1) ++low_bin;
            else if (z >= 0.45 && z < 0.55) ++high_bin;
        }
    }
    const double si = std::sin(53.0 * std::numbers::pi / 180.0);
    const double expected = (std::asin(0.55 / si) - std::asin(0.45 / si)) / std::asin(0.1 / si);
    const double observed = static_cast<double>(high_bin) / low_bin;
    CHECK(observed == doctest::Approx(expected).epsilon(0.04));
    CHECK(observed > 1.1); // more satellites toward the inclination limit
}

TEST_CASE("channel assignment is an equipartition") {
    TrialRng rng(5, 0, 0);
    const auto singleton = assign_channels(12, 12, 0, rng);
    std::vector<int> seen(12, 0);
    for (int ch : singleton) ++seen[ch];
    for (int count : seen) CHECK(count == 1);

    const auto all_same = assign_channels(12, 1, 3, rng);
    for (int ch : all_same) CHECK(ch == 0);

    for (int rep = 0; rep < 200; ++rep) {
        const auto labels = assign_channels(20, 4, 0, rng);
        std::vector<int> counts(4, 0);
        for (int ch : labels) ++counts[ch];
        for (int count : counts) CHECK(count == 5);
    }
    CHECK_THROWS_AS(assign_channels(10, 3, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(assign_channels(10, 2, 10, rng), std::invalid_argument);
}

TEST_CASE("snapshot of a single overhead satellite") {
    RadioParams radio;
    radio.alpha = 2.0;
    radio.serving_fading = FadingModel::non_fading();
    radio.interfering_fading = FadingModel::non_fading();
    const NetworkParams net{1.0, 1};
    const Vec3 user{0.0, 0.0, kGeom.earth_radius_m};
    const std::vector<Vec3> overhead = {{0.0, 0.0, kGeom.orbit_radius_m()}};
    TrialRng rng(1, 0, 0);
    const Snapshot snap = snapshot_sinr(overhead, user, radio, net, rng);
    const double expected =
        radio.effective_serve() * std::pow(kGeom.altitude_m, -2.0) / radio.noise_w;
    CHECK(snap.sinr == doctest::Approx(expected).epsilon(1e-12));
    CHECK(snap.n_interferers == 0);
    CHECK(snap.serving_distance_m == doctest::Approx(kGeom.altitude_m));

    const std::vector<Vec3> antipodal = {{0.0, 0.0, -kGeom.orbit_radius_m()}};
    const Snapshot below = snapshot_sinr(antipodal, user, radio, net, rng);
    CHECK(below.sinr == 0.0);
}

TEST_CASE("horizon test agrees with the slant-range criterion") {
    const double rmax_sq = kGeom.max_range_m() * kGeom.max_range_m();
    const Vec3 user{0.0, 0.0, kGeom.earth_radius_m};
    const double user_r_sq = dot(user, user);
    TrialRng rng(17, 0, 0);
    const auto pts = sample_bpp(100000, kGeom, rng);
    for (const auto& p : pts) {
        const double dx = p.x - user.x, dy = p.y - user.y, dz = p.z - user.z;
        const bool by_range = dx * dx + dy * dy + dz * dz <= rmax_sq;
        const bool by_plane = dot(user, p) >= user_r_sq;
        CHECK(by_range == by_plane);
    }
}

TEST_CASE("interferer counts near a fixed serving distance follow the binomial law") {
    ScenarioConfig cfg{kGeom, NetworkParams{720.0, 20}, RadioParams{}, QuadratureSpec{}};
    const Vec3 user = user_position({0.0, 0.0}, kGeom.earth_radius_m);
    const double r_lo = 1.30e6, r_hi = 1.34e6;
    std::vector<long> hist(36, 0);
    long kept = 0;
    std::vector<Vec3> buf;
    for (long trial = 0; trial < 250000; ++trial) {
        TrialRng rng(23, 0, static_cast<std::uint64_t>(trial));
        buf = sample_bpp(720, kGeom, rng);
        const Snapshot snap = snapshot_sinr(buf, user, cfg.radio, cfg.net, rng);
        if (snap.serving_distance_m < r_lo || snap.serving_distance_m > r_hi) continue;
        ++kept;
        if (snap.n_interferers < 36) ++hist[snap.n_interferers];
    }
    REQUIRE(kept > 10000);
    const double r_mid = 0.5 * (r_lo + r_hi);
    double tv = 0.0;
    for (int i = 0; i < 36; ++i) {
        const double empirical = static_cast<double>(hist[i]) / kept;
        tv += std::abs(empirical - pmf_num_interferers(kGeom, cfg.net, r_mid, i));
    }
    tv *= 0.5;
    CHECK(tv < 0.025);
}

TEST_CASE("estimates are reproducible for a fixed seed and worker count") {
    ScenarioConfig cfg{kGeom, NetworkParams{48.0, 4}, RadioParams{}, QuadratureSpec{}};
    const std::vector<SinrThreshold> ts = {SinrThreshold::from_db(0.0),
                                           SinrThreshold::from_db(10.0)};
    const MCConfig mc{20000, 99, 2};
    const auto a = estimate_coverage(cfg, ConstellationModel::bpp(10.0), ts, mc);
    const auto b = estimate_coverage(cfg, ConstellationModel::bpp(10.0), ts, mc);
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(a[i].mean == b[i].mean);
        CHECK(a[i].std_error == b[i].std_error);
    }
    const auto ra = estimate_rate(cfg, ConstellationModel::bpp(10.0), mc);
    const auto rb = estimate_rate(cfg, ConstellationModel::bpp(10.0), mc);
    CHECK(ra.mean == rb.mean);

    WalkerParams wp{53.0, 8, 6, 1, 1200e3};
    const auto wa = estimate_coverage(cfg, ConstellationModel::walker_shell(wp, 30.0), ts, mc);
    const auto wb = estimate_coverage(cfg, ConstellationModel::walker_shell(wp, 30.0), ts, mc);
    CHECK(wa[0].mean == wb[0].mean);
}

TEST_CASE("random constellations serve every latitude alike") {
    ScenarioConfig cfg{kGeom, NetworkParams{48.0, 4}, RadioParams{}, QuadratureSpec{}};
    const std::vector<SinrThreshold> ts = {SinrThreshold::from_db(0.0)};
    const auto eq = estimate_coverage(cfg, ConstellationModel::bpp(0.0), ts, {60000, 5, 1});
    const auto polar = estimate_coverage(cfg, ConstellationModel::bpp(70.0), ts, {60000, 6, 1});
    const double joint = std::hypot(eq[0].std_error, polar[0].std_error);
    CHECK(std::abs(eq[0].mean - polar[0].mean) < 3.5 * joint);
}

TEST_CASE("low-inclination shells leave high latitudes dark") {
    ScenarioConfig cfg{kGeom, NetworkParams{720.0, 20}, RadioParams{}, QuadratureSpec{}};
    WalkerParams wp{40.0, 20, 36, 1, 1200e3};
    const std::vector<SinrThreshold> ts = {SinrThreshold::from_db(-30.0)};
    const auto est =
        estimate_coverage(cfg, ConstellationModel::walker_shell(wp, 80.0), ts, {2000, 3, 1});
    CHECK(est[0].mean == 0.0);
}

TEST_CASE("estimator input validation") {
    ScenarioConfig cfg{kGeom, NetworkParams{48.5, 4}, RadioParams{}, QuadratureSpec{}};
    CHECK_THROWS_AS(
        estimate_coverage(cfg, ConstellationModel::bpp(0.0), {SinrThreshold{1.0}}, {10, 1, 1}),
        std::invalid_argument);
    ScenarioConfig bad{kGeom, NetworkParams{50.0, 4}, RadioParams{}, QuadratureSpec{}};
    CHECK_THROWS_AS(
        estimate_coverage(bad, ConstellationModel::bpp(0.0), {SinrThreshold{1.0}}, {10, 1, 1}),
        std::invalid_argument);
    WalkerParams mismatched{90.0, 7, 6, 1, 1200e3};
    ScenarioConfig ok{kGeom, NetworkParams{48.0, 4}, RadioParams{}, QuadratureSpec{}};
    CHECK_THROWS_AS(estimate_coverage(ok, ConstellationModel::walker_shell(mismatched, 0.0),
                                      {SinrThreshold{1.0}}, {10, 1, 1}),
                    std::invalid_argument);
}

} // TEST_SUITE
