#include "leocov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leocov {

namespace {

using Cplx = std::complex<double>;

// Tolerances for the outer integrals, loosened so the adaptive rules do not
// chase the noise left by the inner evaluations.
QuadratureSpec outer_spec(const QuadratureSpec& base, double abs_tol, double rel_tol) {
    QuadratureSpec s = base;
    s.abs_tol = std::max(base.abs_tol, abs_tol);
    s.rel_tol = std::max(base.rel_tol, rel_tol);
    return s;
}

// Shared per-scenario state for the theorem evaluations.
struct Kernel {
    const ScenarioConfig& cfg;
    InterferenceContext ictx;
    double rmin, rmax;
    double n;       // satellites (real-valued)
    double m;       // co-channel satellites besides the serving one
    double p_serve; // p_s * ref^alpha
    double noise;

    explicit Kernel(const ScenarioConfig& c)
        : cfg(c),
          ictx(c.interference_context()),
          rmin(c.geom.altitude_m),
          rmax(c.geom.max_range_m()),
          n(c.net.n_sats),
          m(c.net.cochannel_others()),
          p_serve(c.radio.effective_serve()),
          noise(c.radio.noise_w) {}

    double serving_pdf(double r0) const { return pdf_serving_distance(cfg.geom, n, r0); }
    double zero_interf(double r0) const { return prob_zero_interference(cfg.geom, cfg.net, r0); }

    // Probability-domain substitution u = F_serving(r0): integrals against the
    // serving density become integrals du on [0, u_at(rmax)], which stays well
    // conditioned however sharply the density peaks at large n.
    double u_at(double r0) const { return cdf_serving_distance(cfg.geom, n, r0); }
    double r0_at_u(double u) const {
        const double f_single = -std::expm1(std::log1p(-u) / n);
        const double sq = rmin * rmin +
                          f_single * 4.0 * cfg.geom.earth_radius_m * cfg.geom.orbit_radius_m();
        return std::sqrt(sq);
    }

    bool inside() const { return cfg.decomposition == Decomposition::InsideIntegral; }
    bool conditional() const {
        return cfg.normalization == LaplaceNormalization::ConditionalNormalized;
    }

    // Sum over interferer counts >= 1 of binomial weight times the transform
    // power, per the configured normalisation of the inner factor.
    Cplx cochannel_sum(double r0, Cplx s) const {
        return cochannel_laplace_sum(ictx, r0, s, m);
    }

    // (1 - P0) * L_I under the configured normalisation; safe at r0 -> rmax.
    double weighted_laplace(double r0, double s) const {
        const double sum = cochannel_sum(r0, {s, 0.0}).real();
        if (conditional()) return sum;
        return (1.0 - zero_interf(r0)) * sum;
    }

    // L_I alone (the factored decomposition integrates it unweighted).
    double bare_laplace(double r0, double s) const {
        const double sum = cochannel_sum(r0, {s, 0.0}).real();
        if (!conditional()) return sum;
        const double p_any = 1.0 - zero_interf(r0);
        if (p_any < 1e-12) return 1.0;
        return sum / p_any;
    }

    // Transform handed to the Fourier inversion, per normalisation.
    std::function<Cplx(double)> inversion_transform(double r0) const {
        const double p_any = 1.0 - zero_interf(r0);
        const bool cond = conditional();
        return [this, r0, p_any, cond](double w) -> Cplx {
            const Cplx sum = cochannel_sum(r0, {0.0, w});
            if (!cond) return sum;
            if (p_any < 1e-12) return {1.0, 0.0};
            return sum / p_any;
        };
    }

    double mean_zero_interf() const {
        auto f = [&](double r0) { return serving_pdf(r0) * zero_interf(r0); };
        const double visible =
            integrate_adaptive(f, rmin, rmax, outer_spec(cfg.quad, 1e-12, 1e-10)).value;
        const double beyond = 1.0 - cdf_serving_distance(cfg.geom, n, rmax);
        return visible + beyond;
    }
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Truncation point of Int exp(-c(e^t - 1)) dt; the integrand is below
// ~1e-13 of its peak beyond.
double rayleigh_t_cutoff(double c) { return std::log1p(30.0 / c); }

} // namespace

void RadioParams::validate() const {
    if (!(p_serve_w > 0.0)) throw std::invalid_argument("RadioParams: p_serve must be positive");
    if (p_interf_w < 0.0) throw std::invalid_argument("RadioParams: p_interf must be >= 0");
    if (p_interf_w > p_serve_w) {
        throw std::invalid_argument("RadioParams: p_interf must not exceed p_serve");
    }
    if (!(noise_w > 0.0)) throw std::invalid_argument("RadioParams: noise power must be positive");
    if (!(alpha >= 2.0)) throw std::invalid_argument("RadioParams: alpha must be >= 2");
    if (!(path_loss_ref_m > 0.0)) {
        throw std::invalid_argument("RadioParams: path loss reference must be positive");
    }
}

double RadioParams::effective_serve() const {
    return p_serve_w * std::pow(path_loss_ref_m, alpha);
}

double RadioParams::effective_interf() const {
    return p_interf_w * std::pow(path_loss_ref_m, alpha);
}

SinrThreshold SinrThreshold::from_db(double db) {
    return SinrThreshold{std::pow(10.0, db / 10.0)};
}

double SinrThreshold::db() const { return 10.0 * std::log10(linear); }

void ScenarioConfig::validate() const {
    radio.validate();
    quad.validate();
    if (!(net.n_sats >= net.n_channels)) {
        throw std::invalid_argument("ScenarioConfig: n_channels must not exceed n_sats");
    }
}

InterferenceContext ScenarioConfig::interference_context() const {
    return InterferenceContext{geom,  net,           radio.p_interf_w, radio.path_loss_ref_m,
                               radio.alpha, radio.interfering_fading, normalization, quad};
}

double coverage_snr_term(const ScenarioConfig& cfg, SinrThreshold T) {
    cfg.validate();
    if (!(T.linear > 0.0)) throw std::invalid_argument("coverage: threshold must be positive");
    const Kernel k(cfg);
    if (cfg.radio.serving_fading.kind == Fading::Rayleigh) {
        auto f = [&](double r0) {
            const double s = T.linear * std::pow(r0, cfg.radio.alpha) / k.p_serve;
            return k.serving_pdf(r0) * std::exp(-s * k.noise);
        };
        return clamp01(integrate_adaptive(f, k.rmin, k.rmax, outer_spec(cfg.quad, 1e-12, 1e-10)).value);
    }
    if (cfg.radio.serving_fading.kind == Fading::NonFading) {
        const double x = std::pow(k.p_serve / (T.linear * k.noise), 1.0 / cfg.radio.alpha);
        return cdf_serving_distance(cfg.geom, k.n, std::min(x, k.rmax));
    }
    throw std::domain_error("coverage: serving fading must be Rayleigh or NonFading");
}

double coverage_rayleigh(const ScenarioConfig& cfg, SinrThreshold T) {
    cfg.validate();
    if (cfg.radio.serving_fading.kind != Fading::Rayleigh) {
        throw std::domain_error("coverage_rayleigh: serving fading must be Rayleigh");
    }
    if (!(T.linear > 0.0)) throw std::invalid_argument("coverage: threshold must be positive");
    const Kernel k(cfg);
    if (k.m <= 0.0) return coverage_snr_term(cfg, T);

    const auto spec = outer_spec(cfg.quad, 1e-11, 1e-9);
    auto s_of = [&](double r0) { return T.linear * std::pow(r0, cfg.radio.alpha) / k.p_serve; };

    if (k.inside()) {
        auto f = [&](double r0) {
            const double s = s_of(r0);
            const double bracket = k.zero_interf(r0) + k.weighted_laplace(r0, s);
            return k.serving_pdf(r0) * std::exp(-s * k.noise) * bracket;
        };
        return clamp01(integrate_adaptive(f, k.rmin, k.rmax, spec).value);
    }
    auto snr = [&](double r0) { return k.serving_pdf(r0) * std::exp(-s_of(r0) * k.noise); };
    auto sinr = [&](double r0) { return snr(r0) * k.bare_laplace(r0, s_of(r0)); };
    const double p0bar = k.mean_zero_interf();
    const double term_a = integrate_adaptive(snr, k.rmin, k.rmax, spec).value;
    const double term_b = integrate_adaptive(sinr, k.rmin, k.rmax, spec).value;
    return clamp01(p0bar * term_a + (1.0 - p0bar) * term_b);
}

double coverage_nonfading(const ScenarioConfig& cfg, SinrThreshold T) {
    cfg.validate();
    if (cfg.radio.serving_fading.kind != Fading::NonFading) {
        throw std::domain_error("coverage_nonfading: serving fading must be NonFading");
    }
    if (!(T.linear > 0.0)) throw std::invalid_argument("coverage: threshold must be positive");
    const Kernel k(cfg);
    if (k.m <= 0.0) return coverage_snr_term(cfg, T);

    const double x_snr = std::pow(k.p_serve / (T.linear * k.noise), 1.0 / cfg.radio.alpha);
    const double snr_edge = std::min(x_snr, k.rmax);

    QuadratureSpec inv_spec = cfg.quad;
    inv_spec.abs_tol = std::max(cfg.quad.abs_tol, 1e-5);
    inv_spec.rel_tol = std::max(cfg.quad.rel_tol, 1e-4);
    auto interval_prob = [&](double r0) {
        const double x = k.p_serve * std::pow(r0, -cfg.radio.alpha) / T.linear - k.noise;
        if (x <= 0.0) return 0.0;
        return interval_prob_from_laplace(k.inversion_transform(r0), x, inv_spec);
    };
    // The interference piece only contributes below the point where the
    // residual signal budget runs out.
    const double u_edge = k.u_at(std::min(snr_edge, k.rmax));
    const double u_max = k.u_at(k.rmax);

    if (k.inside()) {
        auto snr_term = [&](double u) { return k.zero_interf(k.r0_at_u(u)); };
        const double snr_part = integrate_gauss_composite(snr_term, 0.0, u_edge, 2);
        auto sinr_term = [&](double u) {
            const double r0 = k.r0_at_u(u);
            return (1.0 - k.zero_interf(r0)) * interval_prob(r0);
        };
        const double sinr_part = integrate_gauss_composite(sinr_term, 0.0, u_edge, 3);
        return clamp01(snr_part + sinr_part);
    }
    const double p0bar = k.mean_zero_interf();
    const double term_a = cdf_serving_distance(cfg.geom, k.n, snr_edge);
    (void)u_max;
    auto bare = [&](double u) { return interval_prob(k.r0_at_u(u)); };
    const double term_b = integrate_gauss_composite(bare, 0.0, u_edge, 3);
    return clamp01(p0bar * term_a + (1.0 - p0bar) * term_b);
}

double coverage(const ScenarioConfig& cfg, SinrThreshold T) {
    switch (cfg.radio.serving_fading.kind) {
        case Fading::Rayleigh:
            return coverage_rayleigh(cfg, T);
        case Fading::NonFading:
            return coverage_nonfading(cfg, T);
        default:
            throw std::domain_error("coverage: serving fading must be Rayleigh or NonFading");
    }
}

double expected_log2_one_plus_snr(const ScenarioConfig& cfg) {
    cfg.validate();
    const Kernel k(cfg);
    constexpr double kLn2 = 0.6931471805599453;
    if (cfg.radio.serving_fading.kind == Fading::Rayleigh) {
        const auto spec = outer_spec(cfg.quad, 1e-11, 1e-9);
        auto per_r0 = [&](double r0) {
            const double c = k.noise * std::pow(r0, cfg.radio.alpha) / k.p_serve;
            auto h = [&](double t) { return std::exp(-c * std::expm1(t)); };
            return integrate_adaptive(h, 0.0, rayleigh_t_cutoff(c), spec).value;
        };
        auto f = [&](double r0) { return k.serving_pdf(r0) * per_r0(r0); };
        return integrate_adaptive(f, k.rmin, k.rmax, outer_spec(cfg.quad, 1e-9, 1e-7)).value / kLn2;
    }
    if (cfg.radio.serving_fading.kind == Fading::NonFading) {
        if (cfg.decomposition == Decomposition::InsideIntegral) {
            auto f = [&](double r0) {
                const double snr = k.p_serve * std::pow(r0, -cfg.radio.alpha) / k.noise;
                return k.serving_pdf(r0) * std::log1p(snr);
            };
            const auto spec = outer_spec(cfg.quad, 1e-11, 1e-9);
            return integrate_adaptive(f, k.rmin, k.rmax, spec).value / kLn2;
        }
        // Tail integral of the threshold CDF: constant up to the horizon knee.
        const double t_knee = std::log1p(k.p_serve * std::pow(k.rmax, -cfg.radio.alpha) / k.noise);
        const double t_edge = std::log1p(k.p_serve * std::pow(k.rmin, -cfg.radio.alpha) / k.noise);
        auto f = [&](double t) {
            const double x = std::pow(k.p_serve / (std::expm1(t) * k.noise), 1.0 / cfg.radio.alpha);
            return cdf_serving_distance(cfg.geom, k.n, x);
        };
        const auto spec = outer_spec(cfg.quad, 1e-11, 1e-9);
        double total = t_knee * cdf_serving_distance(cfg.geom, k.n, k.rmax);
        if (t_edge > t_knee) total += integrate_adaptive(f, t_knee, t_edge, spec).value;
        return total / kLn2;
    }
    throw std::domain_error("rate: serving fading must be Rayleigh or NonFading");
}

double rate_rayleigh(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.radio.serving_fading.kind != Fading::Rayleigh) {
        throw std::domain_error("rate_rayleigh: serving fading must be Rayleigh");
    }
    const Kernel k(cfg);
    constexpr double kLn2 = 0.6931471805599453;
    const double K = cfg.net.n_channels;
    if (k.m <= 0.0) return expected_log2_one_plus_snr(cfg) / K;

    const auto t_spec = outer_spec(cfg.quad, 1e-9, 1e-8);
    const auto r_spec = outer_spec(cfg.quad, 1e-8, 1e-6);

    auto snr_t_integral = [&](double r0) {
        const double c = k.noise * std::pow(r0, cfg.radio.alpha) / k.p_serve;
        auto h = [&](double t) { return std::exp(-c * std::expm1(t)); };
        return integrate_adaptive(h, 0.0, rayleigh_t_cutoff(c), t_spec).value;
    };

    if (k.inside()) {
        auto f = [&](double r0) {
            const double c = k.noise * std::pow(r0, cfg.radio.alpha) / k.p_serve;
            const double scale = std::pow(r0, cfg.radio.alpha) / k.p_serve;
            auto h = [&](double t) {
                const double grow = std::expm1(t);
                return std::exp(-c * grow) *
                       (k.zero_interf(r0) + k.weighted_laplace(r0, grow * scale));
            };
            const double inner = integrate_adaptive(h, 0.0, rayleigh_t_cutoff(c), t_spec).value;
            return k.serving_pdf(r0) * inner;
        };
        return integrate_adaptive(f, k.rmin, k.rmax, r_spec).value / (K * kLn2);
    }
    auto f_snr = [&](double r0) { return k.serving_pdf(r0) * snr_t_integral(r0); };
    auto f_sinr = [&](double r0) {
        const double c = k.noise * std::pow(r0, cfg.radio.alpha) / k.p_serve;
        const double scale = std::pow(r0, cfg.radio.alpha) / k.p_serve;
        auto h = [&](double t) {
            const double grow = std::expm1(t);
            return std::exp(-c * grow) * k.bare_laplace(r0, grow * scale);
        };
        return k.serving_pdf(r0) * integrate_adaptive(h, 0.0, rayleigh_t_cutoff(c), t_spec).value;
    };
    const double p0bar = k.mean_zero_interf();
    const double term_a = integrate_adaptive(f_snr, k.rmin, k.rmax, r_spec).value;
    const double term_b = integrate_adaptive(f_sinr, k.rmin, k.rmax, r_spec).value;
    return (p0bar * term_a + (1.0 - p0bar) * term_b) / (K * kLn2);
}

double rate_nonfading(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.radio.serving_fading.kind != Fading::NonFading) {
        throw std::domain_error("rate_nonfading: serving fading must be NonFading");
    }
    const Kernel k(cfg);
    constexpr double kLn2 = 0.6931471805599453;
    const double K = cfg.net.n_channels;
    if (k.m <= 0.0) return expected_log2_one_plus_snr(cfg) / K;

    QuadratureSpec inv_spec = cfg.quad;
    inv_spec.abs_tol = std::max(cfg.quad.abs_tol, 1e-5);
    inv_spec.rel_tol = std::max(cfg.quad.rel_tol, 1e-4);

    // Int over t of P(0 < I < p r0^-a / (e^t - 1) - noise | at least one).
    auto sinr_t_integral = [&](double r0) {
        const auto transform = k.inversion_transform(r0);
        const double y0 = k.p_serve * std::pow(r0, -cfg.radio.alpha);
        const double t_edge = std::log1p(y0 / k.noise);
        auto h = [&](double t) {
            const double x = y0 / std::expm1(t) - k.noise;
            if (x <= 0.0) return 0.0;
            return interval_prob_from_laplace(transform, x, inv_spec);
        };
        return integrate_gauss_composite(h, 0.0, t_edge, 2);
    };

    const double u_max = k.u_at(k.rmax);
    if (k.inside()) {
        auto f = [&](double u) {
            const double r0 = k.r0_at_u(u);
            const double snr = k.p_serve * std::pow(r0, -cfg.radio.alpha) / k.noise;
            const double p0 = k.zero_interf(r0);
            return p0 * std::log1p(snr) + (1.0 - p0) * sinr_t_integral(r0);
        };
        return integrate_gauss_composite(f, 0.0, u_max, 1) / (K * kLn2);
    }
    const double p0bar = k.mean_zero_interf();
    const double term_a = expected_log2_one_plus_snr(cfg) * kLn2;
    auto f = [&](double u) { return sinr_t_integral(k.r0_at_u(u)); };
    const double term_b = integrate_gauss_composite(f, 0.0, u_max, 1);
    return (p0bar * term_a + (1.0 - p0bar) * term_b) / (K * kLn2);
}

double average_rate(const ScenarioConfig& cfg) {
    switch (cfg.radio.serving_fading.kind) {
        case Fading::Rayleigh:
            return rate_rayleigh(cfg);
        case Fading::NonFading:
            return rate_nonfading(cfg);
        default:
            throw std::domain_error("rate: serving fading must be Rayleigh or NonFading");
    }
}

double mean_zero_interference_prob(const ScenarioConfig& cfg) {
    cfg.validate();
    return Kernel(cfg).mean_zero_interf();
}

} // namespace leocov
