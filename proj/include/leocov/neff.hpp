#pragma once

#include <stdexcept>
#include <vector>

#include "leocov/metrics.hpp"

namespace leocov {

/// One point of the curve a fit targets: threshold (linear SINR ratio) and
/// measured coverage for the Coverage metric, channel count and measured
/// rate for the Rate metric.
struct TargetPoint {
    double x;
    double value;
    double std_error = 0.0;
};

struct NeffFitSpec {
    enum class Metric { Coverage, Rate };

    /// Fit abscissae. Empty means pick them from the target curve: for
    /// coverage, up to five thresholds spread over the transition region
    /// (target value in [0.1, 0.9]); for rate, every target point.
    std::vector<double> fit_points;
    Metric metric = Metric::Coverage;
    double n_lo = 1.0;
    double n_hi = 10000.0;
    double fit_tolerance = 0.05;

    void validate() const;
};

struct FitResult {
    double n_eff;
    double mae;
    std::vector<double> points_used;
};

class FitFailure : public std::runtime_error {
public:
    FitFailure(const std::string& what, FitResult best)
        : std::runtime_error(what), best_fit(std::move(best)) {}
    FitResult best_fit;
};

/// Satellite count for which the analytic curve best matches the target, by
/// mean absolute error. A coarse bracketing grid is followed by golden-
/// section refinement; if the sampled objective is not unimodal the grid is
/// refined instead. cfg supplies everything except n_sats, which is swept.
FitResult fit_neff(const std::vector<TargetPoint>& target, const ScenarioConfig& cfg,
                   const NeffFitSpec& spec);

/// Linear rescaling of a fitted count to a constellation of another size.
double scale_neff(const FitResult& fit, double n_ref, double n_new);

/// Mean absolute deviation of the analytic curve at n_sats = n from the
/// target, over the given points (all target points when empty). Exposed for
/// held-out evaluation of a finished fit.
double neff_objective(double n, const std::vector<TargetPoint>& target,
                      const ScenarioConfig& cfg, NeffFitSpec::Metric metric,
                      const std::vector<double>& points);

} // namespace leocov
