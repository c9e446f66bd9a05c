#include "leocov/neff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leocov {

namespace {

double analytic_value(double n, double x, const ScenarioConfig& cfg,
                      NeffFitSpec::Metric metric) {
    ScenarioConfig probe = cfg;
    probe.net.n_sats = n;
    if (metric == NeffFitSpec::Metric::Coverage) {
        return coverage(probe, SinrThreshold{x});
    }
    const int k = static_cast<int>(std::lround(x));
    if (k < 1 || std::abs(x - k) > 1e-9) {
        throw std::invalid_argument("fit_neff: rate targets must sit at integer channel counts");
    }
    probe.net.n_channels = k;
    return average_rate(probe);
}

std::vector<double> default_fit_points(const std::vector<TargetPoint>& target,
                                       NeffFitSpec::Metric metric) {
    std::vector<double> xs;
    if (metric == NeffFitSpec::Metric::Rate) {
        for (const auto& p : target) xs.push_back(p.x);
        return xs;
    }
    std::vector<const TargetPoint*> transition;
    for (const auto& p : target) {
        if (p.value >= 0.1 && p.value <= 0.9) transition.push_back(&p);
    }
    if (transition.empty()) {
        for (const auto& p : target) xs.push_back(p.x);
        return xs;
    }
    // Up to five points, spread evenly over the transition region.
    const size_t want = std::min<size_t>(5, transition.size());
    for (size_t i = 0; i < want; ++i) {
        const size_t idx = want == 1 ? 0 : i * (transition.size() - 1) / (want - 1);
        xs.push_back(transition[idx]->x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

const TargetPoint& point_at(const std::vector<TargetPoint>& target, double x) {
    for (const auto& p : target) {
        if (p.x == x) return p;
    }
    // Fall back to the nearest abscissa.
    const TargetPoint* best = &target.front();
    for (const auto& p : target) {
        if (std::abs(p.x - x) < std::abs(best->x - x)) best = &p;
    }
    return *best;
}

} // namespace

void NeffFitSpec::validate() const {
    if (!(n_lo >= 1.0)) throw std::invalid_argument("NeffFitSpec: n_lo must be >= 1");
    if (!(n_hi > n_lo)) throw std::invalid_argument("NeffFitSpec: need n_lo < n_hi");
    if (!(fit_tolerance > 0.0)) throw std::invalid_argument("NeffFitSpec: tolerance must be positive");
}

double neff_objective(double n, const std::vector<TargetPoint>& target,
                      const ScenarioConfig& cfg, NeffFitSpec::Metric metric,
                      const std::vector<double>& points) {
    if (target.empty()) throw std::invalid_argument("fit_neff: empty target curve");
    double total = 0.0;
    size_t count = 0;
    if (points.empty()) {
        for (const auto& p : target) {
            total += std::abs(analytic_value(n, p.x, cfg, metric) - p.value);
            ++count;
        }
    } else {
        for (double x : points) {
            const TargetPoint& p = point_at(target, x);
            total += std::abs(analytic_value(n, p.x, cfg, metric) - p.value);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

FitResult fit_neff(const std::vector<TargetPoint>& target, const ScenarioConfig& cfg,
                   const NeffFitSpec& spec) {
    spec.validate();
    if (target.empty()) throw std::invalid_argument("fit_neff: empty target curve");
    for (const auto& p : target) {
        if (spec.metric == NeffFitSpec::Metric::Coverage &&
            (p.value < 0.0 || p.value > 1.0)) {
            throw std::invalid_argument("fit_neff: coverage targets must lie in [0, 1]");
        }
        if (spec.metric == NeffFitSpec::Metric::Rate && p.value < 0.0) {
            throw std::invalid_argument("fit_neff: rate targets must be nonnegative");
        }
    }
    const double n_lo = std::max(spec.n_lo, static_cast<double>(cfg.net.n_channels));
    if (!(spec.n_hi > n_lo)) {
        throw std::invalid_argument("fit_neff: search interval collapses below n_channels");
    }

    std::vector<double> points =
        spec.fit_points.empty() ? default_fit_points(target, spec.metric) : spec.fit_points;
    auto objective = [&](double n) {
        return neff_objective(n, target, cfg, spec.metric, points);
    };

    // Coarse bracket, refined when the sampled objective is not unimodal.
    int grid_size = 33;
    double lo = n_lo, hi = spec.n_hi;
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<double> ns(grid_size), vals(grid_size);
        for (int i = 0; i < grid_size; ++i) {
            ns[i] = lo + (hi - lo) * i / (grid_size - 1);
            vals[i] = objective(ns[i]);
        }
        int best = 0;
        for (int i = 1; i < grid_size; ++i) {
            if (vals[i] < vals[best]) best = i;
        }
        int sign_changes = 0;
        for (int i = 1; i + 1 < grid_size; ++i) {
            if ((vals[i] - vals[i - 1]) * (vals[i + 1] - vals[i]) < 0.0) ++sign_changes;
        }
        if (sign_changes <= 1 || attempt == 2) {
            lo = ns[std::max(0, best - 1)];
            hi = ns[std::min(grid_size - 1, best + 1)];
            break;
        }
        // Not unimodal at this resolution: zoom on the sampled minimum.
        lo = ns[std::max(0, best - 2)];
        hi = ns[std::min(grid_size - 1, best + 2)];
        grid_size *= 2;
    }

    // Golden-section refinement.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > std::max(1e-4, 1e-6 * b)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = objective(d);
        }
    }
    const double n_eff = 0.5 * (a + b);
    FitResult result{n_eff, objective(n_eff), points};
    if (result.mae > spec.fit_tolerance) {
        throw FitFailure("fit_neff: best fit misses the tolerance", result);
    }
    return result;
}

double scale_neff(const FitResult& fit, double n_ref, double n_new) {
    if (!(n_ref > 0.0) || !(n_new > 0.0)) {
        throw std::invalid_argument("scale_neff: sizes must be positive");
    }
    return fit.n_eff * n_new / n_ref;
}

} // namespace leocov
