#include "leocov/visibility.hpp"

#include <cmath>
#include <stdexcept>

namespace leocov {

namespace {
constexpr double kIntegralSlack = 1e-9;
}

NetworkParams::NetworkParams(double n_sats_, int n_channels_)
    : n_sats(n_sats_), n_channels(n_channels_) {
    if (n_channels < 1) {
        throw std::invalid_argument("NetworkParams: n_channels must be >= 1");
    }
    if (!(n_sats >= n_channels)) {
        throw std::invalid_argument("NetworkParams: n_channels must not exceed n_sats");
    }
}

bool NetworkParams::integral_group() const {
    const double group = n_sats / n_channels;
    return std::abs(group - std::round(group)) < kIntegralSlack;
}

double prob_visible_interferer(const GeometryParams& g, double r0_m) {
    if (r0_m < g.altitude_m) {
        throw std::invalid_argument("prob_visible_interferer: r0 below altitude");
    }
    if (r0_m >= g.max_range_m()) return 0.0;
    // Ratio of the horizon cap to the shell area not already closer than r0.
    const double excess = (r0_m * r0_m - g.altitude_m * g.altitude_m) / (2.0 * g.earth_radius_m);
    const double p = (g.altitude_m - excess) / (2.0 * g.orbit_radius_m() - excess);
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double prob_zero_interference(const GeometryParams& g, const NetworkParams& net,
                              double r0_m) {
    if (r0_m < g.altitude_m) {
        throw std::invalid_argument("prob_zero_interference: r0 below altitude");
    }
    if (r0_m > g.max_range_m()) return 1.0;
    const double m = net.cochannel_others();
    if (m <= 0.0) return 1.0;
    const double p_vis = prob_visible_interferer(g, r0_m);
    return std::exp(m * std::log1p(-p_vis));
}

double pmf_num_interferers(const GeometryParams& g, const NetworkParams& net,
                           double r0_m, int n) {
    if (!net.integral_group()) {
        throw std::domain_error("pmf_num_interferers: N/K must be an integer");
    }
    const int m = static_cast<int>(std::llround(net.cochannel_others()));
    if (n < 0 || n > m) return 0.0;
    const double p_vis = prob_visible_interferer(g, r0_m);
    if (p_vis <= 0.0) return n == 0 ? 1.0 : 0.0;
    if (p_vis >= 1.0) return n == m ? 1.0 : 0.0;
    // Log-space binomial mass; m may reach ~1e4.
    const double log_choose = std::lgamma(m + 1.0) - std::lgamma(n + 1.0) -
                              std::lgamma(m - n + 1.0);
    const double log_p = log_choose + n * std::log(p_vis) +
                         (m - n) * std::log1p(-p_vis);
    return std::exp(log_p);
}

} // namespace leocov
