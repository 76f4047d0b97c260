#pragma once

#include <cstdint>
#include <string>

#include "innodyn/engine.hpp"

namespace innodyn::cli {

// Each command reads an optional JSON config, applies flag overrides on top
// (handled by the CLI driver), writes its result bundle under `output`, and
// finishes with a manifest.json that regenerates the bundle byte-identically
// when passed back through --config.

struct SimulateConfig {
    SimParams params;
    std::string output = ".";
};

struct FitConfig {
    std::string fitter;      // heaps | kernel | dist
    std::string input;
    std::string org;         // heaps: organization id, empty = most events
    double bin_ratio = 1.6;  // kernel: log-bin growth factor
    int n_bootstrap = 1000;  // dist: bootstrap replicates, 0 disables p-value
    int jobs = 1;            // dist: bootstrap threads
    std::uint64_t x_min = 0; // dist: fixed x_min, 0 = scan candidates
    std::uint64_t seed = 0;  // dist: bootstrap seed
    std::string output = ".";
};

struct ProductSpaceConfig {
    std::string input;
    int period_length = 10;
    int n_random = 100;   // Erdos-Renyi baseline replicates
    bool predict = false; // also run the diversification evaluation
    int horizon_periods = 1;
    int n_bins = 10;
    std::uint64_t seed = 0; // baseline graph seed
    std::string output = ".";
};

struct OracleConfig {
    double nu = 1.0;  // extra implicit-relation check for this pair
    double rho = 2.0;
    double kernel_lambda = 1.0; // extra stationary-distribution check
    double kernel_m = 0.1;
    std::int64_t k_max = 100000;
    std::string output = ".";
};

// Apply a JSON document to a default-initialized config. The document is
// either a bare config object or a manifest envelope {"tool", "version",
// "command", "seed", "config"} whose command must match. Unknown keys throw
// std::invalid_argument.
SimulateConfig simulate_config_from_json(const std::string& text);
FitConfig fit_config_from_json(const std::string& text);
ProductSpaceConfig productspace_config_from_json(const std::string& text);
OracleConfig oracle_config_from_json(const std::string& text);

// Run a command and write its bundle. Validation problems throw
// std::invalid_argument or std::domain_error; IO, convergence, and failed
// oracle checks throw std::runtime_error (the oracle report is written
// before the throw). The CLI driver maps these to exit codes 1 and 2.
void cmd_simulate(const SimulateConfig& cfg);
void cmd_fit(const FitConfig& cfg);
void cmd_productspace(const ProductSpaceConfig& cfg);
void cmd_oracle(const OracleConfig& cfg);

} // namespace innodyn::cli
