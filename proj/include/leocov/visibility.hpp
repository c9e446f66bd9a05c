#pragma once

#include "leocov/geometry.hpp"

namespace leocov {

/// Constellation-level counts: total satellites N and orthogonal channels K.
/// N is real-valued so that fitted (effective) satellite counts can be fed
/// back into the analytic expressions; Monte Carlo requires integer N with
/// K dividing it.
struct NetworkParams {
    double n_sats;
    int n_channels;

    NetworkParams(double n_sats, int n_channels);

    /// N/K - 1, the number of co-channel satellites besides the serving one.
    double cochannel_others() const { return n_sats / n_channels - 1.0; }

    /// True when N/K is an integer (within floating slack).
    bool integral_group() const;
};

/// Probability that a given non-serving satellite is above the user's horizon
/// (so it can interfere) when the serving satellite sits at distance r0.
/// Zero for r0 >= max_range.
double prob_visible_interferer(const GeometryParams& g, double r0_m);

/// Probability that none of the N/K - 1 co-channel satellites is visible,
/// (1 - P_vis)^(N/K - 1). Exponent may be non-integral. One for r0 > max_range.
double prob_zero_interference(const GeometryParams& g, const NetworkParams& net,
                              double r0_m);

/// Binomial mass of exactly n visible co-channel interferers. Requires an
/// integral N/K; throws std::domain_error otherwise.
double pmf_num_interferers(const GeometryParams& g, const NetworkParams& net,
                           double r0_m, int n);

} // namespace leocov
