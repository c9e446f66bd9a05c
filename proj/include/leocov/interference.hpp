#pragma once

#include <complex>

#include "leocov/fading.hpp"
#include "leocov/geometry.hpp"
#include "leocov/quadrature.hpp"
#include "leocov/visibility.hpp"

namespace leocov {

/// Two readings of the aggregate-interference transform.
///
/// PaperLiteral keeps the printed construction: the radial integral is
/// normalised over the whole remaining shell (so it integrates to the
/// visibility probability, not to one) and the sum over interferer counts is
/// not divided by the probability of having any interferer.
/// ConditionalNormalized scales the radial integral over the visible range
/// only and divides by 1 - P(no interferer), which makes the result a proper
/// conditional Laplace transform with L(0) = 1. Monte Carlo arbitration in
/// the acceptance suite decides which variant feeds the coverage and rate
/// expressions by default.
enum class LaplaceNormalization {
    PaperLiteral,
    ConditionalNormalized,
};

struct InterferenceContext {
    GeometryParams geom;
    NetworkParams net;
    double p_interf_w;
    double path_loss_ref_m; // received power = p * (r / ref)^(-alpha)
    double alpha;
    FadingModel fading;
    LaplaceNormalization normalization = LaplaceNormalization::ConditionalNormalized;
    QuadratureSpec quad;

    /// p_i * ref^alpha, the numerator of the received-power law in W m^alpha.
    double effective_interf() const;

    void validate() const;
};

/// Laplace transform of the aggregate co-channel interference seen by a user
/// whose serving satellite sits at distance r0, evaluated at s.
/// The radial integral is done by adaptive quadrature of the gain transform;
/// the sum over interferer counts runs over the binomial weights in log
/// space. Requires an integral N/K. Normalisation follows the context.
std::complex<double> laplace_interference(const InterferenceContext& ctx,
                                          double r0_m, std::complex<double> s);

/// Closed elementary form of the same transform for Rayleigh-faded
/// interferers with path loss exponent 2 or 4, real s >= 0.
/// Throws std::domain_error for other exponents or fading kinds.
double laplace_rayleigh_closed(const InterferenceContext& ctx, double r0_m, double s);

/// Same transform for unit-gain (non-fading) interferers, with the radial
/// integral done by direct complex quadrature of exp(-s p r^-alpha) r.
std::complex<double> laplace_nonfading(const InterferenceContext& ctx,
                                       double r0_m, std::complex<double> s);

// ---- building blocks shared with the coverage/rate evaluations ----

/// Mean gain transform of one interferer conditioned on it being visible:
/// (2/(rmax^2 - r0^2)) Int_{r0}^{rmax} L_G(s p r^-alpha) r dr.
/// Dispatches to the closed forms (Rayleigh, alpha 2 or 4, real s) or to an
/// incomplete-gamma evaluation (non-fading, large phase) where those apply,
/// and to adaptive quadrature otherwise.
std::complex<double> visible_mean_gain_laplace(const InterferenceContext& ctx,
                                               double r0_m, std::complex<double> s);

/// Sum over one-or-more interferers of binomial weight times the per-count
/// transform, continued smoothly in the number of co-channel satellites:
///   (1 - P + P*inner)^m - (1 - P)^m
/// with inner per the context normalisation. Coincides with the explicit
/// binomial sum whenever m is an integer. Not divided by 1 - P(no
/// interferer); callers weight or divide as their decomposition requires.
std::complex<double> cochannel_laplace_sum(const InterferenceContext& ctx,
                                           double r0_m, std::complex<double> s,
                                           double cochannel_others);

} // namespace leocov
