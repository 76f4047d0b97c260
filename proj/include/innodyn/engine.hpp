#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "innodyn/rng.hpp"

namespace innodyn {

enum class Regime { Strong, Weak };

// Parameters of one population run. Rates are per unit time; a step spans
// dt time units and caps the expected events per organization at rate_cap.
struct SimParams {
    double nu = 0.5;          // discovery rate per recombination (> 0)
    double rho = 1.0;         // improvement rate per recombination (> 0)
    double lambda = 2.0;      // recombination arity (>= 1)
    double entry_rate = 0.0;  // mean entrants per step (>= 0)
    double depth_mean = 0.9;  // mean usable fraction d of the search space, (0, 1]
    double scope_mean = 0.2;  // mean broadening fraction s, [0, 1)
    double depth_jitter = 0.0; // half-width of the uniform jitter on d
    double scope_jitter = 0.0; // half-width of the uniform jitter on s
    Regime regime = Regime::Weak;
    double rate_cap = 100.0;  // max expected innovations per org per step (> 0)
    std::int64_t horizon = 100; // number of steps (>= 1)
    double dt = 1.0;          // step length in time units (> 0)
    std::uint64_t seed = 0;

    // Throws std::invalid_argument naming the offending field. Jitter ranges
    // must keep sampled d in (0, 1] and s in [0, 1).
    void validate() const;
};

struct OrgState {
    std::uint32_t org_id = 0;
    std::int64_t birth_time = 0;
    std::uint64_t k = 0;      // cumulative innovations
    std::uint64_t D = 0;      // distinct product types; I = k - D are improvements
    double d_star = 1.0;      // effective search depth, 0 <= d_star <= max(D, 1)
    double eta = 0.0;         // realized fitness ln(depth_mean / (1 - scope_mean))
    std::vector<std::uint32_t> codes; // repertoire, one entry per distinct type

    std::uint64_t improvements() const { return k - D; }
};

struct EventRecord {
    std::uint32_t org_id = 0;
    std::int64_t time = 0;      // step index
    std::uint32_t product_code = 0;
    bool is_new_type = false;   // true = explorative, new to this organization
};

struct Snapshot {
    std::uint32_t org_id = 0;
    std::int64_t time = 0;      // state at the end of this step
    std::uint64_t k = 0;
    std::uint64_t D = 0;
    double d_star = 1.0;
};

struct Trajectory {
    SimParams params;
    std::vector<EventRecord> events;
    std::vector<Snapshot> snapshots;
    std::vector<OrgState> orgs;   // final states, indexed by org_id
    std::uint32_t n_codes = 0;    // product codes are 0 .. n_codes-1
};

// Number of ways to combine lambda elements out of a real-valued pool d_star,
// via the Gamma extension of the binomial coefficient. Zero below threshold.
double recombination_count(double d_star, double lambda);

struct AdjacentPossible {
    double u_new = 0.0;     // rate of discovering a new product type
    double u_improve = 0.0; // rate of improving an existing one
    double u_total = 0.0;
};

// Rates u_new = nu*|R|, u_improve = rho*(k/D)*|R| with |R| floored at 1 so
// organizations below the recombination threshold keep the basal discovery
// channel; an empty organization (k = 0) gets the pure seeding value (nu, 0).
AdjacentPossible adjacent_possible_size(std::uint64_t k, std::uint64_t D, double d_star,
                                        const SimParams& p);

// One multiplicative update of the search space, clamped to [1, max(D, 1)].
// depth in (0, 1], scope in [0, 1).
double update_search_space(double d_star, double depth, double scope, std::uint64_t D);

// ln(depth_mean / (1 - scope_mean)); throws std::domain_error outside
// d in (0, 1], s in [0, 1).
double fitness(double depth_mean, double scope_mean);

// Advances one organization by one step at time t, appending its events.
// next_code is the global product-code counter.
void step_org(OrgState& org, const SimParams& p, Rng& rng, std::int64_t t,
              std::uint32_t& next_code, std::vector<EventRecord>& events);

// Runs a full population: one seed organization at t = 0 plus Poisson(entry_rate)
// entrants per step, all advanced in org_id order from a single RNG stream, so
// equal (params, seed) give identical trajectories.
Trajectory run_population(const SimParams& p);

// Per-event (k, D) points of one organization, in event order.
std::vector<std::pair<double, double>> heaps_pairs(const Trajectory& traj, std::uint32_t org_id);

// (k before step, events during step) pairs pooled over organizations and
// steps, from consecutive snapshots.
std::vector<std::pair<double, double>> kernel_observations(const Trajectory& traj);

// Final cumulative k per organization, skipping orgs below min_k.
std::vector<double> final_k_values(const Trajectory& traj, std::uint64_t min_k = 1);

} // namespace innodyn
