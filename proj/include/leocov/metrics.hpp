#pragma once

#include "leocov/fading.hpp"
#include "leocov/geometry.hpp"
#include "leocov/interference.hpp"
#include "leocov/quadrature.hpp"
#include "leocov/visibility.hpp"

namespace leocov {

/// Link-budget parameters. Received power follows p * (r / path_loss_ref)^-alpha,
/// so the reference distance fixes the unit the power law is anchored to
/// (1 km by default, matching the convention the constellation results are
/// quoted in).
struct RadioParams {
    double p_serve_w = 10.0;
    double p_interf_w = 10.0;
    double noise_w = 1.5848931924611134e-13; // -98 dBm
    double alpha = 2.0;
    FadingModel serving_fading = FadingModel::rayleigh();
    FadingModel interfering_fading = FadingModel::rayleigh();
    double path_loss_ref_m = 1000.0;

    void validate() const;

    double effective_serve() const;  // p_s * ref^alpha, W m^alpha
    double effective_interf() const; // p_i * ref^alpha
};

/// SINR threshold as a linear power ratio.
struct SinrThreshold {
    double linear;

    static SinrThreshold from_db(double db);
    double db() const;
};

/// Placement of the zero-interference weights relative to the serving-distance
/// integral. InsideIntegral keeps the no-interferer probability, which depends
/// on the serving distance, inside the integrand (the total-probability form);
/// FactoredOutsideIntegral mirrors the split construction with the weight
/// averaged over the serving-distance density and applied outside. Monte Carlo
/// arbitration picks the default.
enum class Decomposition {
    FactoredOutsideIntegral,
    InsideIntegral,
};

struct ScenarioConfig {
    GeometryParams geom;
    NetworkParams net;
    RadioParams radio;
    QuadratureSpec quad;
    LaplaceNormalization normalization = LaplaceNormalization::ConditionalNormalized;
    Decomposition decomposition = Decomposition::InsideIntegral;

    void validate() const;

    /// Interference context over the interfering-channel fading model.
    InterferenceContext interference_context() const;
};

/// Probability that the SINR of an arbitrarily located user exceeds T, for a
/// Rayleigh-fading serving channel.
double coverage_rayleigh(const ScenarioConfig& cfg, SinrThreshold T);

/// Same for a non-fading (unit gain) serving channel; the interference part
/// converts the transform into interval probabilities by Fourier inversion.
double coverage_nonfading(const ScenarioConfig& cfg, SinrThreshold T);

/// Dispatch on cfg.radio.serving_fading.
double coverage(const ScenarioConfig& cfg, SinrThreshold T);

/// Mean achievable rate in bit/s/Hz, (1/K) E[log2(1 + SINR)].
double rate_rayleigh(const ScenarioConfig& cfg);
double rate_nonfading(const ScenarioConfig& cfg);
double average_rate(const ScenarioConfig& cfg);

/// The no-interference pieces on their own: P(SNR > T) and E[log2(1 + SNR)].
/// With K = N the full metrics reduce to these exactly.
double coverage_snr_term(const ScenarioConfig& cfg, SinrThreshold T);
double expected_log2_one_plus_snr(const ScenarioConfig& cfg);

/// Zero-interference probability averaged over the serving distance,
/// the outer weight of the factored decomposition.
double mean_zero_interference_prob(const ScenarioConfig& cfg);

} // namespace leocov
