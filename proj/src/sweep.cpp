#include "leocov/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "leocov/neff.hpp"

namespace leocov {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

struct Column {
    SweepOutput output;
    bool monte_carlo;
    bool walker; // meaningful for MC columns only
    std::string name;
};

std::vector<Column> plan_columns(const SweepSpec& sweep) {
    const bool both = sweep.kind_bpp && sweep.kind_walker;
    std::vector<Column> cols;
    for (SweepOutput o : sweep.outputs) {
        switch (o) {
            case SweepOutput::AnalyticCoverage:
                cols.push_back({o, false, false, "analytic_coverage"});
                break;
            case SweepOutput::AnalyticRate:
                cols.push_back({o, false, false, "analytic_rate"});
                break;
            case SweepOutput::McCoverage:
            case SweepOutput::McRate: {
                const std::string base = o == SweepOutput::McCoverage ? "mc_coverage" : "mc_rate";
                if (sweep.kind_bpp) {
                    cols.push_back({o, true, false, both ? base + "_bpp" : base});
                }
                if (sweep.kind_walker) {
                    cols.push_back({o, true, true, both ? base + "_walker" : base});
                }
                break;
            }
        }
    }
    return cols;
}

struct RowState {
    std::vector<double> value;
    std::vector<double> stderr_value;
    std::string error;
};

// Scenario, threshold, latitude and seed for one swept value.
struct RowContext {
    ScenarioConfig scenario;
    WalkerParams walker;
    SinrThreshold threshold;
    double latitude;
    MCConfig mc;
};

RowContext context_for(const LoadedConfig& cfg, SweepVariable variable, double v, size_t row) {
    RowContext ctx{cfg.scenario, cfg.walker, cfg.fixed_threshold, cfg.user_latitude_deg, cfg.mc};
    switch (variable) {
        case SweepVariable::ThresholdDb:
            ctx.threshold = SinrThreshold::from_db(v);
            break;
        case SweepVariable::NChannels: {
            const long k = std::lround(v);
            if (std::abs(v - k) > 1e-9 || k < 1) {
                throw std::invalid_argument("n_channels sweep needs positive integer values");
            }
            ctx.scenario.net = NetworkParams(ctx.scenario.net.n_sats, static_cast<int>(k));
            break;
        }
        case SweepVariable::AltitudeKm:
            ctx.scenario.geom = GeometryParams(ctx.scenario.geom.earth_radius_m, v * 1e3);
            ctx.walker.altitude_m = ctx.scenario.geom.altitude_m;
            break;
        case SweepVariable::UserLatitudeDeg:
            ctx.latitude = v;
            break;
    }
    // Decorrelate per-row trial streams while keeping them reproducible.
    ctx.mc.seed = cfg.mc.seed ^ (0x9e3779b97f4a7c15ULL * (row + 1));
    return ctx;
}

ConstellationModel model_for(const RowContext& ctx, bool walker) {
    return walker ? ConstellationModel::walker_shell(ctx.walker, ctx.latitude)
                  : ConstellationModel::bpp(ctx.latitude);
}

} // namespace

SweepRun run_sweep(const LoadedConfig& cfg, int workers, std::ostream* progress) {
    cfg.sweep.validate();
    cfg.scenario.validate();
    const std::vector<Column> cols = plan_columns(cfg.sweep);
    const size_t n_rows = cfg.sweep.values.size();
    std::vector<RowState> rows(n_rows);
    for (auto& r : rows) {
        r.value.assign(cols.size(), std::nan(""));
        r.stderr_value.assign(cols.size(), std::nan(""));
    }

    // Outputs that do not depend on the swept variable are computed once and
    // replicated. Thresholds additionally share one Monte Carlo run per kind,
    // with every swept threshold evaluated on the same trials.
    const bool threshold_sweep = cfg.sweep.variable == SweepVariable::ThresholdDb;
    const bool latitude_sweep = cfg.sweep.variable == SweepVariable::UserLatitudeDeg;

    std::mutex progress_mutex;
    auto report = [&](const std::string& line) {
        if (!progress) return;
        std::lock_guard<std::mutex> lock(progress_mutex);
        *progress << line << "\n" << std::flush;
    };

    std::vector<SweepRowError> errors;
    std::mutex errors_mutex;

    if (threshold_sweep) {
        std::vector<SinrThreshold> thresholds;
        thresholds.reserve(n_rows);
        for (double v : cfg.sweep.values) thresholds.push_back(SinrThreshold::from_db(v));

        std::optional<double> rate_analytic;
        for (size_t c = 0; c < cols.size(); ++c) {
            const Column& col = cols[c];
            try {
                if (col.output == SweepOutput::AnalyticRate) {
                    if (!rate_analytic) rate_analytic = average_rate(cfg.scenario);
                    for (auto& r : rows) r.value[c] = *rate_analytic;
                } else if (col.output == SweepOutput::McCoverage) {
                    const RowContext ctx = context_for(cfg, cfg.sweep.variable, 0.0, 0);
                    const auto est =
                        estimate_coverage(ctx.scenario, model_for(ctx, col.walker), thresholds, ctx.mc);
                    for (size_t i = 0; i < n_rows; ++i) {
                        rows[i].value[c] = est[i].mean;
                        rows[i].stderr_value[c] = est[i].std_error;
                    }
                    report("# mc_coverage" + std::string(col.walker ? " walker" : " bpp") +
                           ": shared run complete");
                } else if (col.output == SweepOutput::McRate) {
                    const RowContext ctx = context_for(cfg, cfg.sweep.variable, 0.0, 0);
                    const auto est = estimate_rate(ctx.scenario, model_for(ctx, col.walker), ctx.mc);
                    for (auto& r : rows) {
                        r.value[c] = est.mean;
                        r.stderr_value[c] = est.std_error;
                    }
                }
            } catch (const std::exception& e) {
                for (size_t i = 0; i < n_rows; ++i) {
                    if (!rows[i].error.empty()) rows[i].error += "; ";
                    rows[i].error += e.what();
                }
            }
        }
    }

    std::optional<double> shared_cov, shared_rate; // latitude sweeps
    std::mutex shared_mutex;

    auto compute_row = [&](size_t row) {
        const double v = cfg.sweep.values[row];
        RowState& r = rows[row];
        std::optional<RowContext> maybe_ctx;
        try {
            maybe_ctx.emplace(context_for(cfg, cfg.sweep.variable, v, row));
            maybe_ctx->scenario.validate();
        } catch (const std::exception& e) {
            r.error = e.what();
            return;
        }
        const RowContext& ctx = *maybe_ctx;
        for (size_t c = 0; c < cols.size(); ++c) {
            const Column& col = cols[c];
            try {
                switch (col.output) {
                    case SweepOutput::AnalyticCoverage: {
                        if (latitude_sweep) {
                            std::lock_guard<std::mutex> lock(shared_mutex);
                            if (!shared_cov) shared_cov = coverage(cfg.scenario, cfg.fixed_threshold);
                            r.value[c] = *shared_cov;
                        } else {
                            r.value[c] = coverage(ctx.scenario, ctx.threshold);
                        }
                        break;
                    }
                    case SweepOutput::AnalyticRate: {
                        if (latitude_sweep) {
                            std::lock_guard<std::mutex> lock(shared_mutex);
                            if (!shared_rate) shared_rate = average_rate(cfg.scenario);
                            r.value[c] = *shared_rate;
                        } else {
                            r.value[c] = average_rate(ctx.scenario);
                        }
                        break;
                    }
                    case SweepOutput::McCoverage: {
                        const auto est = estimate_coverage(ctx.scenario, model_for(ctx, col.walker),
                                                           {ctx.threshold}, ctx.mc);
                        r.value[c] = est[0].mean;
                        r.stderr_value[c] = est[0].std_error;
                        break;
                    }
                    case SweepOutput::McRate: {
                        const auto est =
                            estimate_rate(ctx.scenario, model_for(ctx, col.walker), ctx.mc);
                        r.value[c] = est.mean;
                        r.stderr_value[c] = est.std_error;
                        break;
                    }
                }
            } catch (const std::exception& e) {
                if (!r.error.empty()) r.error += "; ";
                r.error += std::string(col.name) + ": " + e.what();
            }
        }
        report("# row " + std::to_string(row + 1) + "/" + std::to_string(n_rows) + " value=" +
               format_double(v) + " done");
    };

    if (!threshold_sweep) {
        const int pool = std::max(1, std::min<int>(workers, static_cast<int>(n_rows)));
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int w = 0; w < pool; ++w) {
            threads.emplace_back([&, w]() {
                for (size_t row = w; row < n_rows; row += pool) compute_row(row);
            });
        }
        for (auto& t : threads) t.join();
    } else {
        // Analytic coverage is the only remaining per-row output.
        bool any_left = false;
        for (const Column& col : cols) {
            if (col.output == SweepOutput::AnalyticCoverage) any_left = true;
        }
        if (any_left) {
            const int pool = std::max(1, std::min<int>(workers, static_cast<int>(n_rows)));
            std::vector<std::thread> threads;
            for (int w = 0; w < pool; ++w) {
                threads.emplace_back([&, w]() {
                    for (size_t row = w; row < n_rows; row += pool) {
                        const double v = cfg.sweep.values[row];
                        RowState& r = rows[row];
                        for (size_t c = 0; c < cols.size(); ++c) {
                            if (cols[c].output != SweepOutput::AnalyticCoverage) continue;
                            try {
                                r.value[c] =
                                    coverage(cfg.scenario, SinrThreshold::from_db(v));
                            } catch (const std::exception& e) {
                                if (!r.error.empty()) r.error += "; ";
                                r.error += std::string(cols[c].name) + ": " + e.what();
                            }
                        }
                        report("# row " + std::to_string(row + 1) + "/" +
                               std::to_string(n_rows) + " value=" + format_double(v) + " done");
                    }
                });
            }
            for (auto& t : threads) t.join();
        }
    }

    for (size_t i = 0; i < n_rows; ++i) {
        if (!rows[i].error.empty()) {
            std::lock_guard<std::mutex> lock(errors_mutex);
            errors.push_back({i, rows[i].error});
        }
    }

    std::ostringstream csv;
    csv << "swept_value";
    for (const Column& col : cols) csv << "," << col.name;
    for (const Column& col : cols) {
        if (col.monte_carlo) csv << "," << col.name << "_stderr";
    }
    csv << ",error\r\n";
    for (size_t i = 0; i < n_rows; ++i) {
        csv << format_double(cfg.sweep.values[i]);
        for (size_t c = 0; c < cols.size(); ++c) {
            csv << ",";
            if (!std::isnan(rows[i].value[c])) csv << format_double(rows[i].value[c]);
        }
        for (size_t c = 0; c < cols.size(); ++c) {
            if (!cols[c].monte_carlo) continue;
            csv << ",";
            if (!std::isnan(rows[i].stderr_value[c])) csv << format_double(rows[i].stderr_value[c]);
        }
        csv << "," << csv_escape(rows[i].error) << "\r\n";
    }

    return SweepRun{csv.str(), std::move(errors), config_fingerprint(cfg)};
}

} // namespace leocov
