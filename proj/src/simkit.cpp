#include "leocov/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace leocov {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
    h = mix64(h ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
    state_ = h;
}

std::uint64_t TrialRng::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double TrialRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double TrialRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double TrialRng::exponential() { return -std::log(1.0 - uniform()); }

std::uint32_t TrialRng::below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

void WalkerParams::validate() const {
    if (n_planes < 1 || sats_per_plane < 1) {
        throw std::invalid_argument("WalkerParams: plane counts must be positive");
    }
    if (!(inclination_deg > 0.0) || inclination_deg > 90.0) {
        throw std::invalid_argument("WalkerParams: inclination must be in (0, 90] degrees");
    }
    if (phasing < 0 || phasing >= n_planes) {
        throw std::invalid_argument("WalkerParams: phasing must be in [0, n_planes)");
    }
    if (!(altitude_m > 0.0)) {
        throw std::invalid_argument("WalkerParams: altitude must be positive");
    }
}

namespace {

void sample_bpp_into(std::vector<Vec3>& out, int n, double radius, TrialRng& rng) {
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        double x, y, z, norm_sq;
        do {
            x = rng.normal();
            y = rng.normal();
            z = rng.normal();
            norm_sq = x * x + y * y + z * z;
        } while (norm_sq < 1e-24);
        const double scale = radius / std::sqrt(norm_sq);
        out[i] = {x * scale, y * scale, z * scale};
    }
}

void generate_walker_into(std::vector<Vec3>& out, const WalkerParams& wp,
                          double raan_offset, double anomaly_offset, double earth_radius) {
    const double radius = earth_radius + wp.altitude_m;
    const double incl = wp.inclination_deg * std::numbers::pi / 180.0;
    const double cos_i = std::cos(incl);
    const double sin_i = std::sin(incl);
    const int P = wp.n_planes;
    const int S = wp.sats_per_plane;
    out.resize(static_cast<size_t>(P) * S);
    size_t idx = 0;
    for (int p = 0; p < P; ++p) {
        const double raan = raan_offset + 2.0 * std::numbers::pi * p / P;
        const double cos_o = std::cos(raan);
        const double sin_o = std::sin(raan);
        for (int q = 0; q < S; ++q) {
            const double u = anomaly_offset + 2.0 * std::numbers::pi * q / S +
                             2.0 * std::numbers::pi * wp.phasing * p / (static_cast<double>(P) * S);
            const double cu = std::cos(u);
            const double su = std::sin(u);
            out[idx++] = {radius * (cos_o * cu - sin_o * su * cos_i),
                          radius * (sin_o * cu + cos_o * su * cos_i),
                          radius * su * sin_i};
        }
    }
}

void assign_channels_into(std::vector<int>& labels, int n, int k, TrialRng& rng) {
    labels.resize(n);
    const int group = n / k;
    for (int i = 0; i < n; ++i) labels[i] = i / group;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(i + 1)));
        std::swap(labels[i], labels[j]);
    }
}

struct SimWorkspace {
    std::vector<Vec3> positions;
    std::vector<int> channels;
    std::vector<double> dist_sq;
};

double draw_gain(const FadingModel& model, TrialRng& rng) {
    switch (model.kind) {
        case Fading::Rayleigh:
            return rng.exponential();
        case Fading::NonFading:
            return 1.0;
        default:
            throw std::domain_error("snapshot_sinr: cannot sample a custom-transform gain");
    }
}

Snapshot snapshot_core(std::span<const Vec3> positions, const Vec3& user,
                       const RadioParams& radio, const NetworkParams& net, TrialRng& rng,
                       SimWorkspace& ws) {
    const int n = static_cast<int>(positions.size());
    if (n == 0) throw std::invalid_argument("snapshot_sinr: empty constellation");
    const int k = net.n_channels;
    if (n % k != 0) throw std::invalid_argument("snapshot_sinr: n_channels must divide N");

    ws.dist_sq.resize(n);
    int serving = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double dx = positions[i].x - user.x;
        const double dy = positions[i].y - user.y;
        const double dz = positions[i].z - user.z;
        const double d2 = dx * dx + dy * dy + dz * dz;
        ws.dist_sq[i] = d2;
        if (d2 < best) {
            best = d2;
            serving = i;
        }
    }
    const double serving_distance = std::sqrt(best);
    const double user_r_sq = dot(user, user);
    // Above the local horizon plane iff dot(u, s) >= |u|^2.
    if (dot(user, positions[serving]) < user_r_sq) {
        return {0.0, 0, serving_distance};
    }

    assign_channels_into(ws.channels, n, k, rng);
    const int channel = ws.channels[serving];

    const double alpha = radio.alpha;
    const double p_serve = radio.effective_serve();
    const double p_interf = radio.effective_interf();
    auto loss = [alpha](double d2) {
        if (alpha == 2.0) return 1.0 / d2;
        if (alpha == 4.0) return 1.0 / (d2 * d2);
        return std::pow(d2, -0.5 * alpha);
    };

    const double g0 = draw_gain(radio.serving_fading, rng);
    const double signal = p_serve * g0 * loss(best);

    double interference = 0.0;
    int n_interferers = 0;
    for (int i = 0; i < n; ++i) {
        if (i == serving || ws.channels[i] != channel) continue;
        if (dot(user, positions[i]) < user_r_sq) continue;
        const double gain = draw_gain(radio.interfering_fading, rng);
        interference += p_interf * gain * loss(ws.dist_sq[i]);
        ++n_interferers;
    }
    return {signal / (interference + radio.noise_w), n_interferers, serving_distance};
}

long checked_integer_sats(const ScenarioConfig& cfg) {
    const double n = cfg.net.n_sats;
    const long rounded = std::lround(n);
    if (std::abs(n - rounded) > 1e-9 || rounded < 1) {
        throw std::invalid_argument("simkit: Monte Carlo requires an integer satellite count");
    }
    if (rounded % cfg.net.n_channels != 0) {
        throw std::invalid_argument("simkit: n_channels must divide the satellite count");
    }
    return rounded;
}

// Runs fn(stream, trial, rng) over all trials, striped across logical
// streams. Streams are executed on threads but reduced in stream order by
// the caller, so the partition (not the scheduling) fixes the result.
template <typename PerTrial>
void run_streams(const MCConfig& mc, PerTrial per_trial) {
    const int workers = std::max(1, mc.n_workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (long t = w; t < mc.n_trials; t += workers) {
                per_trial(w, t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

struct TrialSetup {
    const ScenarioConfig& cfg;
    const ConstellationModel& model;
    long n_sats;
    double earth_radius;

    void realise(SimWorkspace& ws, TrialRng& rng, Vec3& user) const {
        if (model.kind == ConstellationModel::Kind::Bpp) {
            user = user_position({model.user_latitude_deg, 0.0}, earth_radius);
            sample_bpp_into(ws.positions, static_cast<int>(n_sats), cfg.geom.orbit_radius_m(), rng);
        } else {
            const double raan = 2.0 * std::numbers::pi * rng.uniform();
            const double anomaly = 2.0 * std::numbers::pi * rng.uniform();
            const double lon = 360.0 * rng.uniform();
            user = user_position({model.user_latitude_deg, lon}, earth_radius);
            generate_walker_into(ws.positions, model.walker, raan, anomaly, earth_radius);
        }
    }
};

TrialSetup make_setup(const ScenarioConfig& cfg, const ConstellationModel& model) {
    cfg.validate();
    const long n = checked_integer_sats(cfg);
    if (model.kind == ConstellationModel::Kind::Walker) {
        model.walker.validate();
        if (model.walker.total() != n) {
            throw std::invalid_argument("simkit: Walker layout size must match n_sats");
        }
        if (std::abs(model.walker.altitude_m - cfg.geom.altitude_m) > 1e-6) {
            throw std::invalid_argument("simkit: Walker altitude must match the scenario geometry");
        }
    }
    return {cfg, model, n, cfg.geom.earth_radius_m};
}

} // namespace

std::vector<Vec3> sample_bpp(int n, const GeometryParams& g, TrialRng& rng) {
    if (n < 1) throw std::invalid_argument("sample_bpp: n must be >= 1");
    std::vector<Vec3> out;
    sample_bpp_into(out, n, g.orbit_radius_m(), rng);
    return out;
}

std::vector<Vec3> generate_walker(const WalkerParams& wp, double raan_offset_rad,
                                  double anomaly_offset_rad, double earth_radius_m) {
    wp.validate();
    std::vector<Vec3> out;
    generate_walker_into(out, wp, raan_offset_rad, anomaly_offset_rad, earth_radius_m);
    return out;
}

Vec3 user_position(const UserLocation& user, double earth_radius_m) {
    if (std::abs(user.latitude_deg) > 90.0) {
        throw std::invalid_argument("UserLocation: |latitude| must be <= 90");
    }
    const double lat = user.latitude_deg * std::numbers::pi / 180.0;
    const double lon = user.longitude_deg * std::numbers::pi / 180.0;
    return {earth_radius_m * std::cos(lat) * std::cos(lon),
            earth_radius_m * std::cos(lat) * std::sin(lon),
            earth_radius_m * std::sin(lat)};
}

std::vector<int> assign_channels(int n, int k, int serving_index, TrialRng& rng) {
    if (n < 1 || k < 1 || n % k != 0) {
        throw std::invalid_argument("assign_channels: k must divide n");
    }
    if (serving_index < 0 || serving_index >= n) {
        throw std::invalid_argument("assign_channels: serving index out of range");
    }
    std::vector<int> labels;
    assign_channels_into(labels, n, k, rng);
    return labels;
}

Snapshot snapshot_sinr(std::span<const Vec3> positions, const Vec3& user,
                       const RadioParams& radio, const NetworkParams& net, TrialRng& rng) {
    SimWorkspace ws;
    return snapshot_core(positions, user, radio, net, rng, ws);
}

ConstellationModel ConstellationModel::bpp(double user_latitude_deg) {
    ConstellationModel m;
    m.kind = Kind::Bpp;
    m.user_latitude_deg = user_latitude_deg;
    return m;
}

ConstellationModel ConstellationModel::walker_shell(const WalkerParams& wp,
                                                    double user_latitude_deg) {
    ConstellationModel m;
    m.kind = Kind::Walker;
    m.walker = wp;
    m.user_latitude_deg = user_latitude_deg;
    return m;
}

std::vector<MCEstimate> estimate_coverage(const ScenarioConfig& cfg,
                                          const ConstellationModel& model,
                                          const std::vector<SinrThreshold>& thresholds,
                                          const MCConfig& mc) {
    if (mc.n_trials < 1) throw std::invalid_argument("estimate_coverage: n_trials must be >= 1");
    if (thresholds.empty()) return {};
    const TrialSetup setup = make_setup(cfg, model);
    const int workers = std::max(1, mc.n_workers);
    const size_t nt = thresholds.size();

    std::vector<std::vector<long>> counts(workers, std::vector<long>(nt, 0));
    run_streams(mc, [&](int w, long t) {
        thread_local SimWorkspace ws;
        TrialRng rng(mc.seed, 0, static_cast<std::uint64_t>(t));
        Vec3 user;
        setup.realise(ws, rng, user);
        const Snapshot snap = snapshot_core(ws.positions, user, cfg.radio, cfg.net, rng, ws);
        for (size_t i = 0; i < nt; ++i) {
            if (snap.sinr > thresholds[i].linear) ++counts[w][i];
        }
    });

    std::vector<MCEstimate> out(nt);
    for (size_t i = 0; i < nt; ++i) {
        long total = 0;
        for (int w = 0; w < workers; ++w) total += counts[w][i];
        const double p = static_cast<double>(total) / mc.n_trials;
        const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / mc.n_trials);
        out[i] = {p, se, mc.n_trials};
    }
    return out;
}

MCEstimate estimate_rate(const ScenarioConfig& cfg, const ConstellationModel& model,
                         const MCConfig& mc) {
    if (mc.n_trials < 1) throw std::invalid_argument("estimate_rate: n_trials must be >= 1");
    const TrialSetup setup = make_setup(cfg, model);
    const int workers = std::max(1, mc.n_workers);
    const double inv_k = 1.0 / cfg.net.n_channels;

    struct StreamAcc {
        double sum = 0.0, sum_c = 0.0;   // Kahan-compensated value sum
        double sq = 0.0, sq_c = 0.0;     // and sum of squares
    };
    std::vector<StreamAcc> acc(workers);
    run_streams(mc, [&](int w, long t) {
        thread_local SimWorkspace ws;
        TrialRng rng(mc.seed, 0, static_cast<std::uint64_t>(t));
        Vec3 user;
        setup.realise(ws, rng, user);
        const Snapshot snap = snapshot_core(ws.positions, user, cfg.radio, cfg.net, rng, ws);
        const double v = inv_k * std::log2(1.0 + snap.sinr);
        StreamAcc& a = acc[w];
        double y = v - a.sum_c;
        double s = a.sum + y;
        a.sum_c = (s - a.sum) - y;
        a.sum = s;
        y = v * v - a.sq_c;
        s = a.sq + y;
        a.sq_c = (s - a.sq) - y;
        a.sq = s;
    });

    double sum = 0.0, sq = 0.0;
    for (const auto& a : acc) {
        sum += a.sum;
        sq += a.sq;
    }
    const double mean = sum / mc.n_trials;
    double se = 0.0;
    if (mc.n_trials > 1) {
        const double var = std::max(0.0, (sq - mc.n_trials * mean * mean) / (mc.n_trials - 1));
        se = std::sqrt(var / mc.n_trials);
    }
    return {mean, se, mc.n_trials};
}

} // namespace leocov
