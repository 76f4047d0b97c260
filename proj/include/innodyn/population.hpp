#pragma once

#include <cstdint>
#include <vector>

#include "innodyn/rng.hpp"

namespace innodyn::laws {

struct StationaryDistribution {
    std::vector<double> p; // p[k] = P(k), index 0 unused, k = 1 .. k_max
    double mu = 0.0;       // self-consistent mean of k^lambda
    double lambda_kernel = 1.0;
    double m = 1.0;
};

// Stationary firm-size distribution of the entry + sublinear-attachment
// master equation: P_k = (k-1)^lambda * P_{k-1} / (mu*m + k^lambda) seeded at
// k = 1, with mu = sum k^lambda P_k solved by bisection on the monotone map
// mu -> E[k^lambda | mu] (tolerance 1e-8, bounded iteration count,
// std::runtime_error on failure). Requires lambda_kernel in (0, 1], m > 0,
// k_max >= 100.
StationaryDistribution stationary_distribution(double lambda_kernel, double m,
                                               std::int64_t k_max);

// Closed-form trajectory k(t) of the reduced fitness model:
// (rho_lambda)^(1/(1-gamma)) * (eta/(1-gamma))^(-1/(1-gamma)) * exp(eta*t/(1-gamma)).
// Throws std::domain_error for eta <= 0, gamma outside [0, 1), or
// rho_lambda <= 0.
double bb_closed_form(double eta, double gamma, double rho_lambda, double t);

enum class EtaKind { Constant, Uniform, TwoPoint };

// Fitness draw specification: Constant(a), Uniform(a, b), or TwoPoint taking
// value a with probability w and b otherwise.
struct EtaDistribution {
    EtaKind kind = EtaKind::Constant;
    double a = 0.0;
    double b = 0.0;
    double w = 0.5;

    double draw(Rng& rng) const;
    double variance() const;
};

struct FitnessLimitResult {
    std::int64_t n_orgs = 0;
    std::int64_t t = 0;
    double mean_log_k = 0.0;
    double var_log_k = 0.0;
    double jb_stat = 0.0; // Jarque-Bera statistic; infinity when degenerate
    double p_value = 0.0; // chi-squared(2) survival exp(-JB/2)
};

// Accumulates ln k_i = sum of t i.i.d. eta draws per organization and tests
// ln k for normality with Jarque-Bera. A zero-variance sample reports an
// infinite statistic and p_value 0.
FitnessLimitResult heterogeneous_fitness_limit(const EtaDistribution& dist,
                                               std::int64_t n_orgs, std::int64_t t,
                                               std::uint64_t seed);

} // namespace innodyn::laws
