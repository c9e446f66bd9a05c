#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leocov/geometry.hpp"
#include "leocov/metrics.hpp"

namespace leocov {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Delta-pattern constellation: n_planes circular orbits at a common
/// inclination, sats_per_plane evenly spaced satellites per plane, and an
/// inter-plane phase step of phasing grid units (2*pi/(P*S) each).
struct WalkerParams {
    double inclination_deg;
    int n_planes;
    int sats_per_plane;
    int phasing;
    double altitude_m;

    int total() const { return n_planes * sats_per_plane; }
    void validate() const;
};

struct UserLocation {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
};

struct MCConfig {
    long n_trials;
    std::uint64_t seed;
    int n_workers = 1;
};

struct MCEstimate {
    double mean;
    double std_error;
    long n_trials;
};

/// Counter-based stream: every (seed, stream, trial) triple owns its own
/// reproducible sequence, so trials can be farmed out to any number of
/// threads without coordination.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

    std::uint64_t next_u64();
    double uniform();             // [0, 1)
    double normal();              // standard normal, Box-Muller with spare
    double exponential();         // unit mean
    std::uint32_t below(std::uint32_t bound);

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// n points drawn uniformly on the orbit sphere (normalised Gaussian triples).
std::vector<Vec3> sample_bpp(int n, const GeometryParams& g, TrialRng& rng);

/// Deterministic delta-pattern layout, rotated by the given node and
/// along-orbit offsets.
std::vector<Vec3> generate_walker(const WalkerParams& wp, double raan_offset_rad,
                                  double anomaly_offset_rad, double earth_radius_m);

Vec3 user_position(const UserLocation& user, double earth_radius_m);

/// Random equipartition of n satellites into k channel groups of n/k each.
/// The user's receive channel is the one assigned to serving_index.
std::vector<int> assign_channels(int n, int k, int serving_index, TrialRng& rng);

struct Snapshot {
    double sinr;
    int n_interferers;
    double serving_distance_m;
};

/// One network realisation: nearest satellite serves, co-channel satellites
/// above the horizon interfere, fading drawn per the configured models.
/// SINR is zero when even the nearest satellite is below the horizon.
Snapshot snapshot_sinr(std::span<const Vec3> positions, const Vec3& user,
                       const RadioParams& radio, const NetworkParams& net, TrialRng& rng);

struct ConstellationModel {
    enum class Kind { Bpp, Walker };
    Kind kind = Kind::Bpp;
    WalkerParams walker{};
    double user_latitude_deg = 0.0;

    static ConstellationModel bpp(double user_latitude_deg = 0.0);
    static ConstellationModel walker_shell(const WalkerParams& wp, double user_latitude_deg);
};

/// Fraction of trials with SINR above each threshold, with binomial standard
/// errors. Every trial redraws the constellation (positions for the random
/// one; node/phase offsets and user longitude for the deterministic one),
/// the channel assignment, and the fading gains. Identical (seed, n_workers)
/// give bit-identical results.
std::vector<MCEstimate> estimate_coverage(const ScenarioConfig& cfg,
                                          const ConstellationModel& model,
                                          const std::vector<SinrThreshold>& thresholds,
                                          const MCConfig& mc);

/// Sample mean of (1/K) log2(1 + SINR) with its standard error.
MCEstimate estimate_rate(const ScenarioConfig& cfg, const ConstellationModel& model,
                         const MCConfig& mc);

} // namespace leocov
