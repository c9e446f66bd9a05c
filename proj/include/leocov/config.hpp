#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "leocov/metrics.hpp"
#include "leocov/simkit.hpp"

namespace leocov {

enum class SweepVariable { ThresholdDb, NChannels, AltitudeKm, UserLatitudeDeg };
enum class SweepOutput { AnalyticCoverage, AnalyticRate, McCoverage, McRate };

struct SweepSpec {
    SweepVariable variable = SweepVariable::ThresholdDb;
    std::vector<double> values;
    std::vector<SweepOutput> outputs; // canonical order, no duplicates
    bool kind_bpp = true;
    bool kind_walker = false;

    void validate() const;
};

/// Everything a run needs, as read from one config file.
struct LoadedConfig {
    ScenarioConfig scenario{GeometryParams(6371e3, 1200e3), NetworkParams(720, 20),
                            RadioParams{}, QuadratureSpec{}};
    WalkerParams walker{90.0, 20, 36, 1, 1200e3};
    double user_latitude_deg = 0.0;
    SinrThreshold fixed_threshold = SinrThreshold{1.0}; // for non-threshold sweeps
    MCConfig mc{100000, 1, 1};
    SweepSpec sweep;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line)
        : std::runtime_error(what), line_number(line) {}
    int line_number;
};

/// Parses the flat sectioned key = value format. Throws ConfigError with the
/// offending line for parse problems and for violated invariants.
LoadedConfig load_config_text(const std::string& text, const std::string& origin);
LoadedConfig load_config(const std::string& path);

/// Canonical text round-trip: load(emit(c)) reproduces the fingerprint.
std::string emit_config(const LoadedConfig& cfg);

/// FNV-1a over the canonical text (covers the seed).
std::uint64_t config_fingerprint(const LoadedConfig& cfg);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

} // namespace leocov
