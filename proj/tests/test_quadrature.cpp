#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "leocov/geometry.hpp"
#include "leocov/quadrature.hpp"
#include "leocov/simkit.hpp"
#include <functional>

using namespace leocov;
using Cplx = std::complex<double>;

TEST_SUITE("quadrature") {

TEST_CASE("basic integrals") {
    QuadratureSpec spec;
    CHECK(integrate_adaptive([](double x) { return x; }, 0.0, 1.0, spec).value ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, spec).value ==
          doctest::Approx(1.0).epsilon(1e-10));

    const GeometryParams geom = GeometryParams::from_km(6371.0, 1200.0);
    auto pdf = [&](double r) { return pdf_any_distance(geom, r); };
    CHECK(integrate_adaptive(pdf, geom.altitude_m, geom.max_range_m(), spec).value ==
          doctest::Approx(0.07924976885484).epsilon(1e-10));
}

TEST_CASE("error estimates bound the true error on an analytic battery") {
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-11;
    struct Case {
        std::function<double(double)> f;
        double a, b, exact;
    };
    const std::vector<Case> battery = {
        {[](double x) { return x * x; }, 0.0, 2.0, 8.0 / 3.0},
        {[](double x) { return std::exp(x); }, 0.0, 1.0, std::numbers::e - 1.0},
        {[](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 2.0},
        {[](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, std::numbers::pi / 4.0},
        {[](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
        {[](double x) { return std::exp(-x * x); }, -4.0, 4.0,
         std::sqrt(std::numbers::pi) * std::erf(4.0)},
        {[](double x) { return std::log(x); }, 1.0, 2.0, 2.0 * std::log(2.0) - 1.0},
        {[](double x) { return std::sin(20.0 * x); }, 0.0, 1.0, (1.0 - std::cos(20.0)) / 20.0},
        {[](double x) { return std::cosh(x); }, -1.0, 1.0, 2.0 * std::sinh(1.0)},
        {[](double x) { return 1.0 / std::sqrt(1e-3 + x); }, 0.0, 1.0,
         2.0 * (std::sqrt(1.001) - std::sqrt(1e-3))},
    };
    for (const auto& c : battery) {
        const auto out = integrate_adaptive(c.f, c.a, c.b, spec);
        CHECK(std::abs(out.value - c.exact) <= std::max(out.error_estimate, 1e-12));
    }
}

TEST_CASE("non-convergence carries the best estimate") {
    QuadratureSpec spec;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-14;
    spec.max_subdivisions = 2;
    bool thrown = false;
    try {
        integrate_adaptive([](double x) { return 1.0 / std::sqrt(1e-8 + std::abs(x - 0.3)); },
                           0.0, 1.0, spec);
    } catch (const QuadratureFailure& f) {
        thrown = true;
        CHECK(f.best_estimate.real() > 0.0);
        CHECK(f.error_estimate > 0.0);
    }
    CHECK(thrown);
}

TEST_CASE("complex quadrature") {
    QuadratureSpec spec;
    auto f = [](double x) { return std::exp(Cplx(0.0, x)); };
    const auto out = integrate_adaptive_complex(f, 0.0, std::numbers::pi / 2.0, spec);
    CHECK(out.value.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.value.imag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inversion of a point mass at zero") {
    QuadratureSpec spec;
    auto unit = [](double) { return Cplx(1.0, 0.0); };
    for (double x : {0.3, 1.0, 4.0}) {
        CHECK(interval_prob_from_laplace(unit, x, spec) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(gil_pelaez_cdf(unit, x, spec) == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("inversion of the unit exponential") {
    QuadratureSpec spec;
    auto laplace = [](double w) { return 1.0 / Cplx(1.0, w); };
    for (double x : {0.1, std::log(2.0), 1.0, 5.0}) {
        const double expected = 1.0 - std::exp(-x);
        CHECK(std::abs(interval_prob_from_laplace(laplace, x, spec) - expected) < 1e-6);
        CHECK(std::abs(gil_pelaez_cdf(laplace, x, spec) - expected) < 1e-6);
        CHECK(std::abs(interval_prob_from_laplace(laplace, x, spec) -
                       gil_pelaez_cdf(laplace, x, spec)) < 1e-6);
    }
    CHECK(interval_prob_from_laplace(laplace, std::log(2.0), spec) ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(interval_prob_from_laplace(laplace, 0.0, spec) == 0.0);
    CHECK(interval_prob_from_laplace(laplace, -1.0, spec) == 0.0);
}

TEST_CASE("interval probability is nondecreasing in the upper bound") {
    QuadratureSpec spec;
    auto laplace = [](double w) { return 1.0 / Cplx(1.0, w); };
    double prev = 0.0;
    for (int i = 1; i <= 30; ++i) {
        const double x = 0.2 * i;
        const double p = interval_prob_from_laplace(laplace, x, spec);
        CHECK(p >= prev - 1e-9);
        prev = p;
    }
}

TEST_CASE("inversion of an Erlang sum matches its closed cdf") {
    QuadratureSpec spec;
    // Sum of two unit exponentials: F(x) = 1 - e^-x (1 + x).
    auto laplace = [](double w) {
        const Cplx d = 1.0 / Cplx(1.0, w);
        return d * d;
    };
    for (double x : {0.5, 1.0, 2.0, 6.0}) {
        const double expected = 1.0 - std::exp(-x) * (1.0 + x);
        CHECK(std::abs(interval_prob_from_laplace(laplace, x, spec) - expected) < 1e-6);
        CHECK(std::abs(gil_pelaez_cdf(laplace, x, spec) - expected) < 1e-6);
    }
}

TEST_CASE("inversion of an empirical characteristic function tracks the empirical cdf") {
    const int n = 20000;
    std::vector<double> samples(n);
    TrialRng rng(99, 0, 0);
    for (int i = 0; i < n; ++i) {
        // Mixture: exponential plus an occasional heavier draw.
        const double u = rng.uniform();
        samples[i] = rng.exponential() * (u < 0.3 ? 3.0 : 1.0);
    }
    auto ecf = [&](double w) {
        Cplx acc = 0.0;
        for (double s : samples) acc += std::polar(1.0, -w * s);
        return acc / static_cast<double>(n);
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-7;
    spec.rel_tol = 1e-6;
    for (double x : {0.8, 2.0}) {
        double ecdf = 0.0;
        for (double s : samples) ecdf += (s < x) ? 1.0 : 0.0;
        ecdf /= n;
        const double se = std::sqrt(ecdf * (1.0 - ecdf) / n);
        const double inv = interval_prob_from_laplace(ecf, x, spec);
        CHECK(std::abs(inv - ecdf) < 3.0 * se + 1e-3);
    }
}

TEST_CASE("truncation cap raises when the tail is unresolved") {
    QuadratureSpec spec;
    spec.omega_truncation = 2.0; // far too small for the exponential transform
    auto laplace = [](double w) { return 1.0 / Cplx(1.0, w); };
    CHECK_THROWS_AS(interval_prob_from_laplace(laplace, 1.0, spec), QuadratureFailure);
}

TEST_CASE("spec validation") {
    QuadratureSpec spec;
    spec.abs_tol = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = QuadratureSpec{};
    spec.max_subdivisions = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

} // TEST_SUITE
