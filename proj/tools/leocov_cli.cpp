#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "leocov/config.hpp"
#include "leocov/metrics.hpp"
#include "leocov/neff.hpp"
#include "leocov/simkit.hpp"
#include "leocov/sweep.hpp"
#include <charconv>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file")->required();
    cmd->add_option("--seed", opts.seed, "override the [mc] seed");
    cmd->add_option("--out", opts.out_path, "output path (default stdout)");
    cmd->add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
}

leocov::LoadedConfig load_or_exit(const CommonOpts& opts) {
    leocov::LoadedConfig cfg = leocov::load_config(opts.config_path);
    if (opts.seed) cfg.mc.seed = *opts.seed;
    return cfg;
}

int write_output(const CommonOpts& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << opts.out_path << "\n";
        return kExitNumerical;
    }
    out << text;
    return 0;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<double> threshold_values(const leocov::LoadedConfig& cfg,
                                     const std::vector<double>& override_db) {
    if (!override_db.empty()) return override_db;
    if (cfg.sweep.variable == leocov::SweepVariable::ThresholdDb && !cfg.sweep.values.empty()) {
        return cfg.sweep.values;
    }
    return {cfg.fixed_threshold.db()};
}

int run_coverage(const CommonOpts& opts, const std::vector<double>& thresholds_db) {
    const leocov::LoadedConfig cfg = load_or_exit(opts);
    std::string csv = "threshold_db,coverage\r\n";
    for (double db : threshold_values(cfg, thresholds_db)) {
        const double p = leocov::coverage(cfg.scenario, leocov::SinrThreshold::from_db(db));
        csv += format_double(db) + "," + format_double(p) + "\r\n";
    }
    return write_output(opts, csv);
}

int run_rate(const CommonOpts& opts) {
    const leocov::LoadedConfig cfg = load_or_exit(opts);
    const double r = leocov::average_rate(cfg.scenario);
    return write_output(opts, "rate_bit_s_hz\r\n" + format_double(r) + "\r\n");
}

int run_simulate(const CommonOpts& opts, bool with_rate) {
    leocov::LoadedConfig cfg = load_or_exit(opts);
    cfg.sweep.outputs = {leocov::SweepOutput::McCoverage};
    if (with_rate) cfg.sweep.outputs.push_back(leocov::SweepOutput::McRate);
    if (cfg.sweep.values.empty()) {
        cfg.sweep.variable = leocov::SweepVariable::ThresholdDb;
        cfg.sweep.values = {cfg.fixed_threshold.db()};
    }
    const leocov::SweepRun run = leocov::run_sweep(cfg, opts.workers, &std::cerr);
    std::cerr << "# fingerprint " << run.fingerprint << "\n";
    const int rc = write_output(opts, run.csv);
    if (rc != 0) return rc;
    return run.errors.empty() ? 0 : kExitNumerical;
}

int run_sweep_cmd(const CommonOpts& opts) {
    const leocov::LoadedConfig cfg = load_or_exit(opts);
    const leocov::SweepRun run = leocov::run_sweep(cfg, opts.workers, &std::cerr);
    std::cerr << "# fingerprint " << run.fingerprint << "\n";
    const int rc = write_output(opts, run.csv);
    if (rc != 0) return rc;
    if (!run.errors.empty()) {
        for (const auto& e : run.errors) {
            std::cerr << "row " << e.row << ": " << e.message << "\n";
        }
        return kExitNumerical;
    }
    return 0;
}

int run_fit_neff(const CommonOpts& opts, double n_lo, double n_hi, double fit_tol,
                 const std::string& metric_word, const std::string& curve_path) {
    if (!(n_lo < n_hi)) {
        std::cerr << "error: fit bounds must satisfy n_lo < n_hi\n";
        return kExitConfig;
    }
    leocov::LoadedConfig cfg = load_or_exit(opts);
    leocov::NeffFitSpec spec;
    spec.n_lo = n_lo;
    spec.n_hi = n_hi;
    spec.fit_tolerance = fit_tol;
    if (metric_word == "coverage") {
        spec.metric = leocov::NeffFitSpec::Metric::Coverage;
    } else if (metric_word == "rate") {
        spec.metric = leocov::NeffFitSpec::Metric::Rate;
    } else {
        std::cerr << "error: metric must be coverage or rate\n";
        return kExitConfig;
    }

    // Target curve from the deterministic constellation's Monte Carlo run.
    const auto model = leocov::ConstellationModel::walker_shell(cfg.walker, cfg.user_latitude_deg);
    std::vector<leocov::TargetPoint> target;
    if (spec.metric == leocov::NeffFitSpec::Metric::Coverage) {
        std::vector<leocov::SinrThreshold> thresholds;
        for (double db : threshold_values(cfg, {})) {
            thresholds.push_back(leocov::SinrThreshold::from_db(db));
        }
        const auto est = leocov::estimate_coverage(cfg.scenario, model, thresholds, cfg.mc);
        for (size_t i = 0; i < thresholds.size(); ++i) {
            target.push_back({thresholds[i].linear, est[i].mean, est[i].std_error});
        }
    } else {
        if (cfg.sweep.variable != leocov::SweepVariable::NChannels || cfg.sweep.values.empty()) {
            std::cerr << "error: rate fitting sweeps n_channels; configure [sweep] accordingly\n";
            return kExitConfig;
        }
        for (double k : cfg.sweep.values) {
            leocov::LoadedConfig point = cfg;
            point.scenario.net =
                leocov::NetworkParams(cfg.scenario.net.n_sats, static_cast<int>(std::lround(k)));
            const auto est = leocov::estimate_rate(point.scenario, model, cfg.mc);
            target.push_back({k, est.mean, est.std_error});
        }
    }

    const leocov::FitResult fit = leocov::fit_neff(target, cfg.scenario, spec);
    const double held_out =
        leocov::neff_objective(fit.n_eff, target, cfg.scenario, spec.metric, {});
    std::string report;
    report += "n_eff," + format_double(fit.n_eff) + "\r\n";
    report += "fit_mae," + format_double(fit.mae) + "\r\n";
    report += "held_out_mae," + format_double(held_out) + "\r\n";
    const int rc = write_output(opts, report);
    if (rc != 0) return rc;

    if (!curve_path.empty()) {
        std::ofstream curve(curve_path, std::ios::binary);
        if (!curve) {
            std::cerr << "error: cannot write " << curve_path << "\n";
            return kExitNumerical;
        }
        curve << "x,target,fitted\r\n";
        leocov::ScenarioConfig fitted_cfg = cfg.scenario;
        fitted_cfg.net.n_sats = fit.n_eff;
        for (const auto& p : target) {
            double fitted;
            if (spec.metric == leocov::NeffFitSpec::Metric::Coverage) {
                fitted = leocov::coverage(fitted_cfg, leocov::SinrThreshold{p.x});
            } else {
                leocov::ScenarioConfig at_k = fitted_cfg;
                at_k.net = leocov::NetworkParams(fit.n_eff, static_cast<int>(std::lround(p.x)));
                fitted = leocov::average_rate(at_k);
            }
            curve << format_double(p.x) << "," << format_double(p.value) << ","
                  << format_double(fitted) << "\r\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Downlink coverage and rate analysis for shell constellations"};
    app.require_subcommand(1);

    CommonOpts coverage_opts, rate_opts, simulate_opts, sweep_opts, fit_opts;
    std::vector<double> thresholds_db;
    bool simulate_rate = false;
    double n_lo = 1.0, n_hi = 10000.0, fit_tol = 0.05;
    std::string metric_word = "coverage", curve_path;

    CLI::App* cmd_coverage = app.add_subcommand("coverage", "analytic coverage probability");
    add_common(cmd_coverage, coverage_opts);
    cmd_coverage->add_option("--threshold-db", thresholds_db,
                             "thresholds in dB (default: sweep values)");

    CLI::App* cmd_rate = app.add_subcommand("rate", "analytic mean achievable rate");
    add_common(cmd_rate, rate_opts);

    CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    add_common(cmd_simulate, simulate_opts);
    cmd_simulate->add_flag("--rate", simulate_rate, "also estimate the rate");

    CLI::App* cmd_fit = app.add_subcommand("fit-neff", "fit the effective satellite count");
    add_common(cmd_fit, fit_opts);
    cmd_fit->add_option("--n-lo", n_lo, "lower search bound");
    cmd_fit->add_option("--n-hi", n_hi, "upper search bound");
    cmd_fit->add_option("--fit-tol", fit_tol, "acceptable mean absolute error");
    cmd_fit->add_option("--metric", metric_word, "coverage or rate");
    cmd_fit->add_option("--emit-curve", curve_path, "write fitted-vs-target CSV here");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common(cmd_sweep, sweep_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_coverage->parsed()) return run_coverage(coverage_opts, thresholds_db);
        if (cmd_rate->parsed()) return run_rate(rate_opts);
        if (cmd_simulate->parsed()) return run_simulate(simulate_opts, simulate_rate);
        if (cmd_sweep->parsed()) return run_sweep_cmd(sweep_opts);
        if (cmd_fit->parsed()) {
            return run_fit_neff(fit_opts, n_lo, n_hi, fit_tol, metric_word, curve_path);
        }
    } catch (const leocov::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const leocov::FitFailure& e) {
        std::cerr << "fit failure: " << e.what() << " (best n_eff "
                  << e.best_fit.n_eff << ", mae " << e.best_fit.mae << ")\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
