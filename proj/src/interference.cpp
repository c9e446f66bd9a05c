#include "leocov/interference.hpp"

#include <cmath>
#include <stdexcept>

namespace leocov {

namespace {

using Cplx = std::complex<double>;

constexpr double kPhaseDirectLimit = 30.0; // rad of arc handled by plain quadrature

// Continued fraction for the upper incomplete gamma Gamma(a, z), modified
// Lentz form. Reliable for |z| >= ~20 with |arg z| <= pi/2, which is the only
// regime it is called in.
Cplx upper_gamma_cf(double a, Cplx z) {
    const double tiny = 1e-300;
    Cplx b = z + 1.0 - a;
    Cplx c = 1.0 / tiny;
    Cplx d = 1.0 / b;
    Cplx h = d;
    for (int i = 1; i <= 400; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const Cplx delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-z + a * std::log(z)) * h;
}

struct ShellGeometry {
    double rmax;
    double rmax_sq;
    double support_sq;
};

ShellGeometry shell(const GeometryParams& g) {
    const double rmax = g.max_range_m();
    const double support = g.support_max_m();
    return {rmax, rmax * rmax, support * support};
}

// Int_{r0}^{rmax} L_G(s p r^-alpha) r dr by adaptive complex quadrature.
Cplx radial_integral_quadrature(const InterferenceContext& ctx, double r0_m, Cplx s) {
    const double p_eff = ctx.effective_interf();
    auto integrand = [&](double r) {
        return laplace_gain(ctx.fading, s * p_eff * std::pow(r, -ctx.alpha)) * r;
    };
    return integrate_adaptive_complex(integrand, r0_m, ctx.geom.max_range_m(), ctx.quad).value;
}

// Non-fading radial integral with the oscillatory tail evaluated through the
// incomplete gamma function: after y = p r^-alpha,
//   Int exp(-s y) y^(-2/alpha - 1) dy * p^(2/alpha) / alpha,
// and Int_{ya}^{yb} y^(-c-1) e^(-sy) dy = s^c [Gamma(-c, s ya) - Gamma(-c, s yb)].
Cplx radial_integral_nonfading(const InterferenceContext& ctx, double r0_m, Cplx s) {
    const double p_eff = ctx.effective_interf();
    const double rmax = ctx.geom.max_range_m();
    const double y_low = p_eff * std::pow(rmax, -ctx.alpha);  // gentler end
    const double y_high = p_eff * std::pow(r0_m, -ctx.alpha); // oscillatory end
    const double mag = std::abs(s);
    if (mag * (y_high - y_low) <= kPhaseDirectLimit) {
        auto integrand = [&](double r) {
            return std::exp(-s * p_eff * std::pow(r, -ctx.alpha)) * r;
        };
        return integrate_adaptive_complex(integrand, r0_m, rmax, ctx.quad).value;
    }
    const double c = 2.0 / ctx.alpha;
    const double scale = std::pow(p_eff, c) / ctx.alpha;
    const double y_split = std::max(y_low, kPhaseDirectLimit / mag);
    Cplx total = 0.0;
    if (y_split > y_low) {
        auto integrand = [&](double y) {
            return std::exp(-s * y) * std::pow(y, -c - 1.0);
        };
        total += integrate_adaptive_complex(integrand, y_low, y_split, ctx.quad).value;
    }
    total += std::exp(c * std::log(s)) *
             (upper_gamma_cf(-c, s * y_split) - upper_gamma_cf(-c, s * y_high));
    return scale * total;
}

// Closed form of the Rayleigh radial integral for alpha = 2:
//   (rmax^2 - r0^2)/2 * [1 + ps/(rmax^2 - r0^2) * ln((ps + r0^2)/(ps + rmax^2))]
double rayleigh_bracket_alpha2(const ShellGeometry& sh, double r0_sq, double ps) {
    if (ps == 0.0) return 1.0;
    const double span = sh.rmax_sq - r0_sq;
    return 1.0 + ps / span * std::log1p((r0_sq - sh.rmax_sq) / (ps + sh.rmax_sq));
}

// Closed form for alpha = 4:
//   1 + sqrt(ps)/(rmax^2 - r0^2) * atan(sqrt(ps)(r0^2 - rmax^2)/(ps + rmax^2 r0^2))
double rayleigh_bracket_alpha4(const ShellGeometry& sh, double r0_sq, double ps) {
    if (ps == 0.0) return 1.0;
    const double span = sh.rmax_sq - r0_sq;
    const double root = std::sqrt(ps);
    return 1.0 + root / span * std::atan(root * (r0_sq - sh.rmax_sq) / (ps + sh.rmax_sq * r0_sq));
}

// Visible-range normalised mean gain transform ("inner" factor of the
// per-interferer contribution); equals 1 at s = 0.
Cplx inner_mean(const InterferenceContext& ctx, double r0_m, Cplx s) {
    if (s == Cplx(0.0, 0.0)) return 1.0;
    const ShellGeometry sh = shell(ctx.geom);
    const double span = sh.rmax_sq - r0_m * r0_m;
    if (span <= 0.0) return 1.0;
    if (ctx.fading.kind == Fading::Rayleigh && s.imag() == 0.0 && s.real() >= 0.0) {
        const double ps = ctx.effective_interf() * s.real();
        if (ctx.alpha == 2.0) return rayleigh_bracket_alpha2(sh, r0_m * r0_m, ps);
        if (ctx.alpha == 4.0) return rayleigh_bracket_alpha4(sh, r0_m * r0_m, ps);
    }
    if (ctx.fading.kind == Fading::NonFading) {
        return 2.0 / span * radial_integral_nonfading(ctx, r0_m, s);
    }
    return 2.0 / span * radial_integral_quadrature(ctx, r0_m, s);
}

Cplx inner_effective(const InterferenceContext& ctx, double r0_m, double p_vis, Cplx g) {
    // The literal construction normalises the radial integral over the whole
    // remaining shell, which multiplies the visible-range mean by P_vis.
    if (ctx.normalization == LaplaceNormalization::PaperLiteral) return p_vis * g;
    (void)r0_m;
    return g;
}

long integral_cochannel_count(const NetworkParams& net) {
    if (!net.integral_group()) {
        throw std::domain_error("laplace_interference: N/K must be an integer");
    }
    return std::llround(net.cochannel_others());
}

// Sum over n >= 1 of binom(m, n) P^n (1-P)^(m-n) inner^n, weights in log
// space, Kahan-compensated, terms below 1e-18 of the running sum dropped
// once past the binomial mode.
Cplx binomial_sum(long m, double p_vis, Cplx inner) {
    if (m <= 0 || p_vis <= 0.0) return 0.0;
    const double log_p = std::log(p_vis);
    const double log_q = std::log1p(-p_vis);
    const double lg_m1 = std::lgamma(m + 1.0);
    const Cplx log_inner = std::log(inner == Cplx(0.0, 0.0) ? Cplx(1e-300, 0.0) : inner);
    const double mode = m * p_vis;
    Cplx sum = 0.0;
    Cplx comp = 0.0; // Kahan carry
    for (long n = 1; n <= m; ++n) {
        const double logw = lg_m1 - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0) +
                            n * log_p + (m - n) * log_q;
        const Cplx term = std::exp(Cplx(logw, 0.0) + static_cast<double>(n) * log_inner);
        const Cplx y = term - comp;
        const Cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (n > mode && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

Cplx apply_normalization(const InterferenceContext& ctx, double p_vis, double m, Cplx sum) {
    if (ctx.normalization == LaplaceNormalization::PaperLiteral) return sum;
    const double p_none = std::exp(m * std::log1p(-p_vis));
    const double p_any = 1.0 - p_none;
    if (p_any <= 0.0) return 1.0; // no interferer possible: conditioning degenerates
    return sum / p_any;
}

} // namespace

double InterferenceContext::effective_interf() const {
    return p_interf_w * std::pow(path_loss_ref_m, alpha);
}

void InterferenceContext::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("InterferenceContext: alpha must be positive");
    if (p_interf_w < 0.0) throw std::invalid_argument("InterferenceContext: p_interf must be >= 0");
    if (!(path_loss_ref_m > 0.0)) {
        throw std::invalid_argument("InterferenceContext: path loss reference must be positive");
    }
}

std::complex<double> laplace_interference(const InterferenceContext& ctx,
                                          double r0_m, std::complex<double> s) {
    ctx.validate();
    const long m = integral_cochannel_count(ctx.net);
    const double p_vis = prob_visible_interferer(ctx.geom, r0_m);
    if (m <= 0 || p_vis <= 0.0) {
        return ctx.normalization == LaplaceNormalization::ConditionalNormalized ? 1.0 : 0.0;
    }
    const ShellGeometry sh = shell(ctx.geom);
    const double span = sh.rmax_sq - r0_m * r0_m;
    const Cplx g = (s == Cplx(0.0, 0.0)) ? Cplx(1.0, 0.0)
                                         : 2.0 / span * radial_integral_quadrature(ctx, r0_m, s);
    const Cplx sum = binomial_sum(m, p_vis, inner_effective(ctx, r0_m, p_vis, g));
    return apply_normalization(ctx, p_vis, static_cast<double>(m), sum);
}

double laplace_rayleigh_closed(const InterferenceContext& ctx, double r0_m, double s) {
    ctx.validate();
    if (ctx.fading.kind != Fading::Rayleigh) {
        throw std::domain_error("laplace_rayleigh_closed: interferer fading must be Rayleigh");
    }
    if (ctx.alpha != 2.0 && ctx.alpha != 4.0) {
        throw std::domain_error("laplace_rayleigh_closed: closed form exists for alpha 2 or 4 only");
    }
    if (s < 0.0) throw std::domain_error("laplace_rayleigh_closed: s must be >= 0");
    const long m = integral_cochannel_count(ctx.net);
    const double p_vis = prob_visible_interferer(ctx.geom, r0_m);
    if (m <= 0 || p_vis <= 0.0) {
        return ctx.normalization == LaplaceNormalization::ConditionalNormalized ? 1.0 : 0.0;
    }
    const ShellGeometry sh = shell(ctx.geom);
    const double ps = ctx.effective_interf() * s;
    const double bracket = ctx.alpha == 2.0 ? rayleigh_bracket_alpha2(sh, r0_m * r0_m, ps)
                                            : rayleigh_bracket_alpha4(sh, r0_m * r0_m, ps);
    const Cplx sum = binomial_sum(m, p_vis, inner_effective(ctx, r0_m, p_vis, bracket));
    return apply_normalization(ctx, p_vis, static_cast<double>(m), sum).real();
}

std::complex<double> laplace_nonfading(const InterferenceContext& ctx,
                                       double r0_m, std::complex<double> s) {
    ctx.validate();
    if (ctx.fading.kind != Fading::NonFading) {
        throw std::domain_error("laplace_nonfading: interferer fading must be NonFading");
    }
    const long m = integral_cochannel_count(ctx.net);
    const double p_vis = prob_visible_interferer(ctx.geom, r0_m);
    if (m <= 0 || p_vis <= 0.0) {
        return ctx.normalization == LaplaceNormalization::ConditionalNormalized ? 1.0 : 0.0;
    }
    const ShellGeometry sh = shell(ctx.geom);
    const double span = sh.rmax_sq - r0_m * r0_m;
    const double p_eff = ctx.effective_interf();
    Cplx g;
    if (s == Cplx(0.0, 0.0)) {
        g = 1.0;
    } else {
        auto integrand = [&](double r) {
            return std::exp(-s * p_eff * std::pow(r, -ctx.alpha)) * r;
        };
        g = 2.0 / span *
            integrate_adaptive_complex(integrand, r0_m, ctx.geom.max_range_m(), ctx.quad).value;
    }
    const Cplx sum = binomial_sum(m, p_vis, inner_effective(ctx, r0_m, p_vis, g));
    return apply_normalization(ctx, p_vis, static_cast<double>(m), sum);
}

std::complex<double> visible_mean_gain_laplace(const InterferenceContext& ctx,
                                               double r0_m, std::complex<double> s) {
    ctx.validate();
    return inner_mean(ctx, r0_m, s);
}

std::complex<double> cochannel_laplace_sum(const InterferenceContext& ctx,
                                           double r0_m, std::complex<double> s,
                                           double cochannel_others) {
    ctx.validate();
    if (cochannel_others <= 0.0) return 0.0;
    const double p_vis = prob_visible_interferer(ctx.geom, r0_m);
    if (p_vis <= 0.0) return 0.0;
    const Cplx inner = inner_effective(ctx, r0_m, p_vis, inner_mean(ctx, r0_m, s));
    const Cplx base = 1.0 - p_vis + p_vis * inner;
    const Cplx with = std::exp(cochannel_others * std::log(base));
    const double without = std::exp(cochannel_others * std::log1p(-p_vis));
    return with - without;
}

} // namespace leocov
