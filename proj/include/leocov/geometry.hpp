#pragma once

namespace leocov {

/// Shell geometry of a constellation: Earth radius and orbit altitude.
/// All distances in this library are meters unless a name says otherwise.
struct GeometryParams {
    double earth_radius_m;
    double altitude_m;

    GeometryParams(double earth_radius_m, double altitude_m);

    static GeometryParams from_km(double earth_radius_km, double altitude_km);

    /// Radius of the sphere the satellites live on.
    double orbit_radius_m() const { return earth_radius_m + altitude_m; }

    /// Largest user-satellite distance with the satellite still above the
    /// user's local horizon plane, sqrt(2*r_e*h + h^2).
    double max_range_m() const;

    /// Farthest point of the orbit shell from a surface user (antipodal).
    double support_max_m() const { return 2.0 * earth_radius_m + altitude_m; }
};

/// CDF of the distance from a surface user to one uniformly placed satellite.
/// Quadratic on [altitude, 2*r_e + altitude], clamped to [0, 1] outside.
double cdf_any_distance(const GeometryParams& g, double r_m);

/// Density of the same distance: r / (2 r_e (r_e + h)) on the support.
double pdf_any_distance(const GeometryParams& g, double r_m);

/// CDF of the nearest of n_sats satellites, 1 - (1 - F(r))^n.
/// n_sats may be non-integral; it enters only through the exponent.
double cdf_serving_distance(const GeometryParams& g, double n_sats, double r0_m);

/// Density of the nearest of n_sats satellites.
double pdf_serving_distance(const GeometryParams& g, double n_sats, double r0_m);

/// Density of a non-serving satellite's distance given the serving satellite
/// sits at r0: f(rn) / (1 - F(r0)) for r0 < rn <= support_max, else 0.
double pdf_conditional_distance(const GeometryParams& g, double r0_m, double rn_m);

} // namespace leocov
