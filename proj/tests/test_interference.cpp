#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "leocov/interference.hpp"
#include "leocov/simkit.hpp"

using namespace leocov;
using Cplx = std::complex<double>;

namespace {

const GeometryParams kGeom = GeometryParams::from_km(6371.0, 1200.0);
const NetworkParams kNet{720.0, 20};

InterferenceContext make_ctx(double alpha, FadingModel fading,
                             LaplaceNormalization norm) {
    return InterferenceContext{kGeom, kNet, 10.0, 1000.0, alpha, std::move(fading), norm,
                               QuadratureSpec{}};
}

// Upper incomplete gamma by quadrature of its defining integral, used as the
// independent real-axis oracle: Gamma(a, x) = e^-x Int_0^1 (x - ln u)^(a-1) du.
double upper_gamma_by_quadrature(double a, double x) {
    QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-12;
    auto f = [&](double u) { return std::pow(x - std::log(u), a - 1.0); };
    return std::exp(-x) * integrate_adaptive(f, 0.0, 1.0, spec).value;
}

double binom_weight(int m, int n, double p) {
    return std::exp(std::lgamma(m + 1.0) - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0) +
                    n * std::log(p) + (m - n) * std::log1p(-p));
}

} // namespace

TEST_SUITE("interference") {

TEST_CASE("gain transforms") {
    CHECK(laplace_gain(FadingModel::rayleigh(), {0.0, 0.0}).real() == doctest::Approx(1.0));
    CHECK(laplace_gain(FadingModel::rayleigh(), {1.0, 0.0}).real() == doctest::Approx(0.5));
    const Cplx unit = laplace_gain(FadingModel::non_fading(), {0.0, 1.0});
    CHECK(unit.real() == doctest::Approx(0.5403023058681398).epsilon(1e-12));
    CHECK(unit.imag() == doctest::Approx(-0.8414709848078965).epsilon(1e-12));

    CHECK_THROWS_AS(
        FadingModel::custom_laplace([](Cplx) { return Cplx(0.9, 0.0); }),
        std::invalid_argument);
    const FadingModel nakagami_like = FadingModel::custom_laplace(
        [](Cplx z) { return std::pow(1.0 + z / 2.0, -2.0); });
    CHECK(laplace_gain(nakagami_like, {1.0, 0.0}).real() == doctest::Approx(4.0 / 9.0));
    const FadingModel broken = FadingModel::custom_laplace([](Cplx z) {
        if (z.real() > 0.5) return Cplx(std::nan(""), 0.0);
        return Cplx(1.0, 0.0) - z;
    });
    CHECK_THROWS_AS(laplace_gain(broken, {1.0, 0.0}), std::domain_error);
}

TEST_CASE("transform at zero per normalisation") {
    const double r0 = kGeom.altitude_m;
    auto cond = make_ctx(2.0, FadingModel::rayleigh(), LaplaceNormalization::ConditionalNormalized);
    CHECK(laplace_interference(cond, r0, {0.0, 0.0}).real() == doctest::Approx(1.0));

    auto literal = make_ctx(2.0, FadingModel::rayleigh(), LaplaceNormalization::PaperLiteral);
    const double p = prob_visible_interferer(kGeom, r0);
    const double closed = std::pow(1.0 - p + p * p, 35.0) - std::pow(1.0 - p, 35.0);
    CHECK(laplace_interference(literal, r0, {0.0, 0.0}).real() ==
          doctest::Approx(closed).epsilon(1e-10));
    CHECK(laplace_interference(literal, r0, {0.0, 0.0}).real() ==
          doctest::Approx(0.0149313397845).epsilon(1e-8));
}

TEST_CASE("closed Rayleigh forms match the quadrature route") {
    for (double alpha : {2.0, 4.0}) {
        for (auto norm : {LaplaceNormalization::ConditionalNormalized,
                          LaplaceNormalization::PaperLiteral}) {
            auto ctx = make_ctx(alpha, FadingModel::rayleigh(), norm);
            const double y_scale = ctx.effective_interf();
            for (int i = 0; i < 6; ++i) {
                const double r0 =
                    kGeom.altitude_m + (kGeom.max_range_m() * 0.999 - kGeom.altitude_m) * i / 5.0;
                for (int j = 0; j < 6; ++j) {
                    const double s =
                        std::pow(10.0, -2.0 + 4.0 * j / 5.0) / (y_scale * std::pow(r0, -alpha));
                    const double closed = laplace_rayleigh_closed(ctx, r0, s);
                    const Cplx quad = laplace_interference(ctx, r0, {s, 0.0});
                    CHECK(std::abs(closed - quad.real()) <= 1e-8 * std::abs(closed));
                }
            }
        }
    }
}

TEST_CASE("closed form at zero matches the generic transform at zero") {
    for (auto norm : {LaplaceNormalization::ConditionalNormalized,
                      LaplaceNormalization::PaperLiteral}) {
        auto ctx = make_ctx(4.0, FadingModel::rayleigh(), norm);
        const double r0 = 1.5e6;
        CHECK(laplace_rayleigh_closed(ctx, r0, 0.0) ==
              doctest::Approx(laplace_interference(ctx, r0, {0.0, 0.0}).real()).epsilon(1e-12));
    }
}

TEST_CASE("closed form rejects unsupported configurations") {
    auto ctx = make_ctx(3.0, FadingModel::rayleigh(), LaplaceNormalization::ConditionalNormalized);
    CHECK_THROWS_AS(laplace_rayleigh_closed(ctx, 1.5e6, 1.0), std::domain_error);
    auto nf = make_ctx(2.0, FadingModel::non_fading(), LaplaceNormalization::ConditionalNormalized);
    CHECK_THROWS_AS(laplace_rayleigh_closed(nf, 1.5e6, 1.0), std::domain_error);
    auto bad_net = make_ctx(2.0, FadingModel::rayleigh(), LaplaceNormalization::ConditionalNormalized);
    bad_net.net = NetworkParams{720.0, 77};
    CHECK_THROWS_AS(laplace_interference(bad_net, 1.5e6, Cplx{1.0, 0.0}), std::domain_error);
}

TEST_CASE("non-fading transform against the incomplete-gamma oracle on the real axis") {
    for (double alpha : {2.0, 4.0}) {
        auto ctx = make_ctx(alpha, FadingModel::non_fading(), LaplaceNormalization::PaperLiteral);
        const double p_eff = ctx.effective_interf();
        const double rmax = kGeom.max_range_m();
        const double support_sq = kGeom.support_max_m() * kGeom.support_max_m();
        const int m = 35;
        for (double r0 : {1.3e6, 2.5e6}) {
            const double p = prob_visible_interferer(kGeom, r0);
            for (double ratio : {0.3, 3.0}) {
                const double s = ratio / (p_eff * std::pow(r0, -alpha));
                const double c = 2.0 / alpha;
                const double g1 = upper_gamma_by_quadrature(-c, s * p_eff * std::pow(rmax, -alpha));
                const double g2 = upper_gamma_by_quadrature(-c, s * p_eff * std::pow(r0, -alpha));
                const double inner = 2.0 * std::pow(s * p_eff, c) /
                                     (alpha * (support_sq - r0 * r0)) * (g1 - g2);
                double expected = 0.0;
                for (int n = 1; n <= m; ++n) {
                    expected += binom_weight(m, n, p) * std::pow(inner, n);
                }
                const Cplx got = laplace_nonfading(ctx, r0, {s, 0.0});
                CHECK(std::abs(got.real() - expected) <= 1e-7 * std::abs(expected));
                CHECK(std::abs(got.imag()) < 1e-12);
            }
        }
    }
}

TEST_CASE("conjugate symmetry on the imaginary axis") {
    const double r0 = 1.4e6;
    std::vector<InterferenceContext> ctxs = {
        make_ctx(2.0, FadingModel::rayleigh(), LaplaceNormalization::ConditionalNormalized),
        make_ctx(2.0, FadingModel::non_fading(), LaplaceNormalization::ConditionalNormalized),
        make_ctx(4.0, FadingModel::non_fading(), LaplaceNormalization::PaperLiteral),
    };
    for (const auto& ctx : ctxs) {
        const double w = 2.0 / (ctx.effective_interf() * std::pow(r0, -ctx.alpha));
        const Cplx plus = laplace_interference(ctx, r0, {0.0, w});
        const Cplx minus = laplace_interference(ctx, r0, {0.0, -w});
        CHECK(std::abs(minus - std::conj(plus)) < 1e-12);
    }
}

TEST_CASE("conditional transform is monotone and bounded for real arguments") {
    auto ctx = make_ctx(2.0, FadingModel::rayleigh(), LaplaceNormalization::ConditionalNormalized);
    const double r0 = 1.35e6;
    const double y0 = ctx.effective_interf() * std::pow(r0, -2.0);
    double prev = 1.0;
    for (int i = 0; i <= 40; ++i) {
        const double s = std::pow(10.0, -2.0 + 5.0 * i / 40.0) / y0;
        const double v = laplace_rayleigh_closed(ctx, r0, s);
        CHECK(v > 0.0);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    CHECK(prev < 0.2); // decayed once s is deep in the tail
}

TEST_CASE("smooth continuation agrees with the explicit binomial sum") {
    for (auto norm : {LaplaceNormalization::ConditionalNormalized,
                      LaplaceNormalization::PaperLiteral}) {
        for (auto fading : {FadingModel::rayleigh(), FadingModel::non_fading()}) {
            auto ctx = make_ctx(2.0, fading, norm);
            const double r0 = 1.5e6;
            const double p = prob_visible_interferer(kGeom, r0);
            const double p_any = 1.0 - std::pow(1.0 - p, 35.0);
            const double y0 = ctx.effective_interf() * std::pow(r0, -2.0);
            for (double ratio : {0.0, 0.4, 5.0}) {
                const Cplx s{ratio / y0, 0.3 * ratio / y0};
                const Cplx sum = cochannel_laplace_sum(ctx, r0, s, 35.0);
                const Cplx reference = laplace_interference(ctx, r0, s);
                const Cplx expected =
                    norm == LaplaceNormalization::ConditionalNormalized ? sum / p_any : sum;
                CHECK(std::abs(expected - reference) <=
                      1e-9 * std::max(1.0, std::abs(reference)));
            }
        }
    }
}

TEST_CASE("fast non-fading mean gain equals direct quadrature at large phase") {
    auto ctx = make_ctx(2.0, FadingModel::non_fading(), LaplaceNormalization::ConditionalNormalized);
    const double r0 = 1.3e6;
    const double rmax = kGeom.max_range_m();
    const double span = rmax * rmax - r0 * r0;
    const double p_eff = ctx.effective_interf();
    QuadratureSpec tight;
    tight.abs_tol = 1e-13;
    tight.rel_tol = 1e-12;
    tight.max_subdivisions = 20000;
    for (double phase : {60.0, 400.0}) {
        const Cplx s{0.0, phase / (p_eff * std::pow(r0, -2.0))};
        auto integrand = [&](double r) { return std::exp(-s * p_eff / (r * r)) * r; };
        const Cplx direct =
            2.0 / span * integrate_adaptive_complex(integrand, r0, rmax, tight).value;
        const Cplx fast = visible_mean_gain_laplace(ctx, r0, s);
        CHECK(std::abs(fast - direct) < 1e-9);
    }
}

TEST_CASE("conditional transform matches conditional Monte Carlo snapshots") {
    const double r0 = 1.4e6;
    const double rmax = kGeom.max_range_m();
    const double f0 = cdf_any_distance(kGeom, r0);
    const double scale_sq = 4.0 * kGeom.earth_radius_m * kGeom.orbit_radius_m();
    const int m = 35;
    const long snapshots = 1000000;

    for (auto fading : {FadingModel::rayleigh(), FadingModel::non_fading()}) {
        auto ctx = make_ctx(2.0, fading, LaplaceNormalization::ConditionalNormalized);
        const double p_eff = ctx.effective_interf();
        const double y0 = p_eff * std::pow(r0, -2.0);
        for (double ratio : {0.1, 1.0, 10.0}) {
            const double s = ratio / y0;
            double sum = 0.0, sum_sq = 0.0;
            long kept = 0;
            TrialRng rng(4242, 0, static_cast<std::uint64_t>(ratio * 1000));
            for (long it = 0; it < snapshots; ++it) {
                double interf = 0.0;
                int visible = 0;
                for (int sat = 0; sat < m; ++sat) {
                    const double pq = f0 + rng.uniform() * (1.0 - f0);
                    const double r_sq =
                        kGeom.altitude_m * kGeom.altitude_m + pq * scale_sq;
                    if (r_sq > rmax * rmax) continue;
                    const double gain =
                        fading.kind == Fading::Rayleigh ? rng.exponential() : 1.0;
                    interf += p_eff * gain / r_sq;
                    ++visible;
                }
                if (visible == 0) continue;
                const double v = std::exp(-s * interf);
                sum += v;
                sum_sq += v * v;
                ++kept;
            }
            const double mean = sum / kept;
            const double var = (sum_sq - kept * mean * mean) / (kept - 1);
            const double se = std::sqrt(var / kept);
            const double analytic = laplace_interference(ctx, r0, {s, 0.0}).real();
            CHECK(std::abs(analytic - mean) < 3.0 * se + 1e-9);
        }
    }
}

} // TEST_SUITE
