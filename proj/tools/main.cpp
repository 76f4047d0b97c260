#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "innodyn/commands.hpp"
#include "innodyn/version.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

template <typename T>
void apply(const std::optional<T>& v, T& dst) {
    if (v) dst = *v;
}

// Flag values live in optionals so the merge order is explicit:
// defaults, then the JSON config file, then flags that were actually given.

struct SimulateFlags {
    std::optional<double> nu, rho, lambda, entry_rate, depth_mean, scope_mean, depth_jitter,
        scope_jitter, rate_cap, dt;
    std::optional<std::string> regime;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;

    innodyn::cli::SimulateConfig merge(innodyn::cli::SimulateConfig cfg) const {
        apply(nu, cfg.params.nu);
        apply(rho, cfg.params.rho);
        apply(lambda, cfg.params.lambda);
        apply(entry_rate, cfg.params.entry_rate);
        apply(depth_mean, cfg.params.depth_mean);
        apply(scope_mean, cfg.params.scope_mean);
        apply(depth_jitter, cfg.params.depth_jitter);
        apply(scope_jitter, cfg.params.scope_jitter);
        apply(rate_cap, cfg.params.rate_cap);
        apply(dt, cfg.params.dt);
        apply(horizon, cfg.params.horizon);
        apply(seed, cfg.params.seed);
        if (regime) {
            if (*regime == "weak") cfg.params.regime = innodyn::Regime::Weak;
            else if (*regime == "strong") cfg.params.regime = innodyn::Regime::Strong;
            else throw std::invalid_argument("regime must be 'weak' or 'strong'");
        }
        apply(output, cfg.output);
        return cfg;
    }
};

struct FitFlags {
    std::string fitter; // positional
    std::optional<std::string> input, org, output;
    std::optional<double> bin_ratio;
    std::optional<int> n_bootstrap, jobs;
    std::optional<std::uint64_t> x_min, seed;

    innodyn::cli::FitConfig merge(innodyn::cli::FitConfig cfg) const {
        if (!fitter.empty()) cfg.fitter = fitter;
        apply(input, cfg.input);
        apply(org, cfg.org);
        apply(bin_ratio, cfg.bin_ratio);
        apply(n_bootstrap, cfg.n_bootstrap);
        apply(jobs, cfg.jobs);
        apply(x_min, cfg.x_min);
        apply(seed, cfg.seed);
        apply(output, cfg.output);
        return cfg;
    }
};

struct ProductSpaceFlags {
    std::optional<std::string> input, output;
    std::optional<int> period_length, n_random, horizon_periods, n_bins;
    std::optional<std::uint64_t> seed;
    bool predict = false;

    innodyn::cli::ProductSpaceConfig merge(innodyn::cli::ProductSpaceConfig cfg) const {
        apply(input, cfg.input);
        apply(period_length, cfg.period_length);
        apply(n_random, cfg.n_random);
        apply(horizon_periods, cfg.horizon_periods);
        apply(n_bins, cfg.n_bins);
        apply(seed, cfg.seed);
        if (predict) cfg.predict = true;
        apply(output, cfg.output);
        return cfg;
    }
};

struct OracleFlags {
    std::optional<double> nu, rho, kernel_lambda, kernel_m;
    std::optional<std::int64_t> k_max;
    std::optional<std::string> output;

    innodyn::cli::OracleConfig merge(innodyn::cli::OracleConfig cfg) const {
        apply(nu, cfg.nu);
        apply(rho, cfg.rho);
        apply(kernel_lambda, cfg.kernel_lambda);
        apply(kernel_m, cfg.kernel_m);
        apply(k_max, cfg.k_max);
        apply(output, cfg.output);
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"innodyn: recombinant innovation dynamics simulator and analysis toolkit"};
    app.set_version_flag("--version", std::string(INNODYN_VERSION));
    app.require_subcommand(0, 1);

    std::string config_path;

    auto* sim = app.add_subcommand(
        "simulate", "Run a population simulation and export trajectory CSVs");
    SimulateFlags sf;
    sim->add_option("--config", config_path, "JSON config file or a previous manifest.json");
    sim->add_option("--nu", sf.nu, "discovery rate per recombination (default 0.5)");
    sim->add_option("--rho", sf.rho, "improvement rate per recombination (default 1.0)");
    sim->add_option("--lambda", sf.lambda, "recombination arity (default 2.0)");
    sim->add_option("--entry-rate", sf.entry_rate, "mean entrants per step (default 0)");
    sim->add_option("--depth-mean", sf.depth_mean, "mean search depth d (default 0.9)");
    sim->add_option("--scope-mean", sf.scope_mean, "mean broadening s (default 0.2)");
    sim->add_option("--depth-jitter", sf.depth_jitter,
                    "half-width of uniform jitter on d (default 0)");
    sim->add_option("--scope-jitter", sf.scope_jitter,
                    "half-width of uniform jitter on s (default 0)");
    sim->add_option("--regime", sf.regime, "search regime: weak or strong (default weak)");
    sim->add_option("--rate-cap", sf.rate_cap,
                    "max expected innovations per org per step (default 100)");
    sim->add_option("--horizon", sf.horizon, "number of steps (default 100)");
    sim->add_option("--dt", sf.dt, "step length in time units (default 1.0)");
    sim->add_option("--seed", sf.seed, "RNG seed (default 0)");
    sim->add_option("--output", sf.output, "output directory (default .)");

    auto* fit = app.add_subcommand("fit", "Fit statistical laws to a CSV input");
    FitFlags ff;
    fit->add_option("--config", config_path, "JSON config file or a previous manifest.json");
    fit->add_option("fitter", ff.fitter, "one of: heaps, kernel, dist");
    fit->add_option("--input", ff.input,
                    "input CSV (events for heaps, events or snapshots for kernel, "
                    "values for dist)");
    fit->add_option("--org", ff.org,
                    "heaps: organization id (default: the one with most events)");
    fit->add_option("--bin-ratio", ff.bin_ratio, "kernel: log-bin growth factor (default 1.6)");
    fit->add_option("--n-bootstrap", ff.n_bootstrap,
                    "dist: bootstrap replicates, 0 disables the p-value (default 1000)");
    fit->add_option("--jobs", ff.jobs, "dist: bootstrap threads (default 1)");
    fit->add_option("--x-min", ff.x_min, "dist: fix x_min instead of scanning (default scan)");
    fit->add_option("--seed", ff.seed, "dist: bootstrap seed (default 0)");
    fit->add_option("--output", ff.output, "output directory (default .)");

    auto* prod = app.add_subcommand(
        "productspace", "Build the product-space network from an events CSV");
    ProductSpaceFlags pf;
    prod->add_option("--config", config_path, "JSON config file or a previous manifest.json");
    prod->add_option("--input", pf.input, "events CSV: org_id,year,product_code");
    prod->add_option("--period-length", pf.period_length, "years per period (default 10)");
    prod->add_option("--n-random", pf.n_random,
                     "random-graph baseline replicates (default 100)");
    prod->add_flag("--predict", pf.predict, "also run the diversification evaluation");
    prod->add_option("--horizon-periods", pf.horizon_periods,
                     "prediction horizon in periods (default 1)");
    prod->add_option("--n-bins", pf.n_bins, "prediction density bins (default 10)");
    prod->add_option("--seed", pf.seed, "baseline graph seed (default 0)");
    prod->add_option("--output", pf.output, "output directory (default .)");

    auto* orc = app.add_subcommand("oracle", "Run the analytic self-checks and write a report");
    OracleFlags of;
    orc->add_option("--config", config_path, "JSON config file or a previous manifest.json");
    orc->add_option("--nu", of.nu, "extra implicit-relation check: nu (default 1.0)");
    orc->add_option("--rho", of.rho, "extra implicit-relation check: rho (default 2.0)");
    orc->add_option("--kernel-lambda", of.kernel_lambda,
                    "stationary-distribution check: kernel exponent (default 1.0)");
    orc->add_option("--kernel-m", of.kernel_m,
                    "stationary-distribution check: entry mass m (default 0.1)");
    orc->add_option("--k-max", of.k_max,
                    "stationary-distribution truncation (default 100000)");
    orc->add_option("--output", of.output, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) {
            innodyn::cli::SimulateConfig cfg;
            if (!config_path.empty())
                cfg = innodyn::cli::simulate_config_from_json(slurp(config_path));
            innodyn::cli::cmd_simulate(sf.merge(cfg));
        } else if (fit->parsed()) {
            innodyn::cli::FitConfig cfg;
            if (!config_path.empty())
                cfg = innodyn::cli::fit_config_from_json(slurp(config_path));
            innodyn::cli::cmd_fit(ff.merge(cfg));
        } else if (prod->parsed()) {
            innodyn::cli::ProductSpaceConfig cfg;
            if (!config_path.empty())
                cfg = innodyn::cli::productspace_config_from_json(slurp(config_path));
            innodyn::cli::cmd_productspace(pf.merge(cfg));
        } else if (orc->parsed()) {
            innodyn::cli::OracleConfig cfg;
            if (!config_path.empty())
                cfg = innodyn::cli::oracle_config_from_json(slurp(config_path));
            innodyn::cli::cmd_oracle(of.merge(cfg));
        } else {
            std::cerr << app.help() << std::endl;
            return 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
