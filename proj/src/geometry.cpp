#include "leocov/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace leocov {

GeometryParams::GeometryParams(double earth_radius, double altitude)
    : earth_radius_m(earth_radius), altitude_m(altitude) {
    if (!(earth_radius > 0.0)) {
        throw std::invalid_argument("GeometryParams: earth radius must be positive");
    }
    if (!(altitude > 0.0)) {
        throw std::invalid_argument("GeometryParams: altitude must be positive");
    }
}

GeometryParams GeometryParams::from_km(double earth_radius_km, double altitude_km) {
    return GeometryParams(earth_radius_km * 1e3, altitude_km * 1e3);
}

double GeometryParams::max_range_m() const {
    return std::sqrt(altitude_m * (2.0 * earth_radius_m + altitude_m));
}

double cdf_any_distance(const GeometryParams& g, double r_m) {
    if (r_m <= g.altitude_m) return 0.0;
    if (r_m >= g.support_max_m()) return 1.0;
    const double num = r_m * r_m - g.altitude_m * g.altitude_m;
    const double den = 4.0 * g.earth_radius_m * g.orbit_radius_m();
    const double f = num / den;
    return f < 0.0 ? 0.0 : f;
}

double pdf_any_distance(const GeometryParams& g, double r_m) {
    if (r_m < g.altitude_m || r_m > g.support_max_m()) return 0.0;
    return r_m / (2.0 * g.earth_radius_m * g.orbit_radius_m());
}

double cdf_serving_distance(const GeometryParams& g, double n_sats, double r0_m) {
    if (!(n_sats > 0.0)) {
        throw std::invalid_argument("cdf_serving_distance: n_sats must be positive");
    }
    const double f = cdf_any_distance(g, r0_m);
    if (f <= 0.0) return 0.0;
    if (f >= 1.0) return 1.0;
    // 1 - (1-f)^n, evaluated stably for large n.
    return -std::expm1(n_sats * std::log1p(-f));
}

double pdf_serving_distance(const GeometryParams& g, double n_sats, double r0_m) {
    if (!(n_sats > 0.0)) {
        throw std::invalid_argument("pdf_serving_distance: n_sats must be positive");
    }
    if (r0_m < g.altitude_m || r0_m > g.support_max_m()) return 0.0;
    const double f = cdf_any_distance(g, r0_m);
    const double survive = (n_sats - 1.0) * std::log1p(-f);
    return n_sats * std::exp(survive) * pdf_any_distance(g, r0_m);
}

double pdf_conditional_distance(const GeometryParams& g, double r0_m, double rn_m) {
    if (r0_m < g.altitude_m || r0_m > g.support_max_m()) {
        throw std::invalid_argument("pdf_conditional_distance: r0 outside support");
    }
    if (rn_m <= r0_m || rn_m > g.support_max_m()) return 0.0;
    const double tail = 1.0 - cdf_any_distance(g, r0_m);
    if (tail <= 0.0) return 0.0;
    return pdf_any_distance(g, rn_m) / tail;
}

} // namespace leocov
