#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace leocov {

/// Tolerances and budgets for the integration routines.
///
/// omega_truncation caps the frequency axis of the inversion integrals
/// (0 means no hard cap; the convergence rules below decide).
/// omega_growth_check is the fraction of abs_tol below which a half-period
/// panel counts as spent; fifty consecutive spent panels end the integral.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;
    double omega_truncation = 0.0;
    double omega_growth_check = 0.01;

    void validate() const;
};

struct QuadratureResult {
    double value;
    double error_estimate;
};

struct ComplexQuadratureResult {
    std::complex<double> value;
    double error_estimate;
};

/// Thrown when an integral cannot reach its tolerance. Carries the best
/// estimate formed so far.
class QuadratureFailure : public std::runtime_error {
public:
    QuadratureFailure(const std::string& what, std::complex<double> best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}

    std::complex<double> best_estimate;
    double error_estimate;
};

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureSpec& spec);

ComplexQuadratureResult integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f,
    double a, double b, const QuadratureSpec& spec);

/// Integration over [a, inf) through the rational map x = a + t/(1-t).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f,
                                       double a, const QuadratureSpec& spec);

/// Composite fixed-order (32-point Gauss-Legendre per segment) integration.
/// Used where the integrand carries deterministic evaluation noise that an
/// adaptive rule would chase, e.g. around the numeric transform inversions.
double integrate_gauss_composite(const std::function<double(double)>& f,
                                 double a, double b, int segments);

/// P(0 < I < x) for a nonnegative random variable with conditional Laplace
/// transform L, from the Fourier identity
///   P = (2/pi) * Int_0^inf Re[L(jw)] sin(x w)/w dw.
/// laplace_at_jw receives the real frequency w and must return L(jw).
/// The frequency axis is cut into half-period panels of width pi/x whose
/// partial sums are accelerated with iterated Aitken extrapolation.
/// Returns 0 for x <= 0; the result is clamped to [0, 1].
double interval_prob_from_laplace(
    const std::function<std::complex<double>(double)>& laplace_at_jw,
    double x, const QuadratureSpec& spec);

/// Independent inversion path used to cross-check interval_prob_from_laplace:
///   F(x) = 1/2 - (1/pi) * Int_0^inf Im[e^{-jwx} conj(L(jw))]/w dw.
double gil_pelaez_cdf(const std::function<std::complex<double>(double)>& laplace_at_jw,
                      double x, const QuadratureSpec& spec);

} // namespace leocov
