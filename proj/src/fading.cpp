#include "leocov/fading.hpp"

#include <cmath>
#include <stdexcept>

namespace leocov {

FadingModel FadingModel::custom_laplace(
    std::function<std::complex<double>(std::complex<double>)> transform) {
    if (!transform) {
        throw std::invalid_argument("FadingModel: custom transform must be callable");
    }
    const std::complex<double> at_zero = transform({0.0, 0.0});
    if (std::abs(at_zero - std::complex<double>(1.0, 0.0)) > 1e-12) {
        throw std::invalid_argument("FadingModel: custom transform must satisfy L(0) = 1");
    }
    return {Fading::CustomLaplace, std::move(transform)};
}

std::complex<double> laplace_gain(const FadingModel& model, std::complex<double> z) {
    switch (model.kind) {
        case Fading::Rayleigh:
            return 1.0 / (1.0 + z);
        case Fading::NonFading:
            return std::exp(-z);
        case Fading::CustomLaplace: {
            const std::complex<double> v = model.custom(z);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw std::domain_error("laplace_gain: custom transform returned non-finite value");
            }
            return v;
        }
    }
    throw std::logic_error("laplace_gain: unknown fading kind");
}

} // namespace leocov
