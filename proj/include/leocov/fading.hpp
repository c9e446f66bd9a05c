#pragma once

#include <complex>
#include <functional>

namespace leocov {

enum class Fading {
    Rayleigh,   // unit-mean exponential power gain, L(z) = 1/(1+z)
    NonFading,  // constant unit gain, L(z) = exp(-z)
    CustomLaplace,
};

/// Per-link channel gain model, described by the Laplace transform of the
/// gain. Custom transforms must satisfy L(0) = 1; this is checked when the
/// model is built.
struct FadingModel {
    Fading kind = Fading::Rayleigh;
    std::function<std::complex<double>(std::complex<double>)> custom;

    static FadingModel rayleigh() { return {Fading::Rayleigh, {}}; }
    static FadingModel non_fading() { return {Fading::NonFading, {}}; }
    static FadingModel custom_laplace(
        std::function<std::complex<double>(std::complex<double>)> transform);
};

/// Laplace transform of the gain at z. Throws std::domain_error when a custom
/// handle produces a non-finite value.
std::complex<double> laplace_gain(const FadingModel& model, std::complex<double> z);

} // namespace leocov
