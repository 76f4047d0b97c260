#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace innodyn::ps {

struct PsEvent {
    std::string org;
    std::int64_t year = 0;
    std::string product;
};

// Innovation counts aggregated into fixed-length periods. For each period the
// table holds the within-period flows (delta) and the counts accumulated
// strictly before the period start (cum); a year on a period boundary belongs
// to the later period. Periods cover the full contiguous range between the
// first and last event, including empty ones.
struct CountsTable {
    int period_length = 10;
    std::vector<std::string> orgs;     // org_id -> name
    std::vector<std::string> products; // product_id -> name

    struct PeriodCounts {
        std::int64_t start = 0;
        std::unordered_map<std::uint64_t, std::int64_t> delta; // (org, product) flows
        std::vector<std::int64_t> delta_by_product;            // per product
        std::unordered_map<std::uint64_t, std::int64_t> cum;   // (org, product) history
        std::vector<std::int64_t> cum_by_org;
        std::vector<std::int64_t> cum_by_product;
        std::int64_t cum_total = 0;
    };
    std::vector<PeriodCounts> periods;

    std::map<std::string, std::uint32_t> org_id;
    std::map<std::string, std::uint32_t> product_id;

    static std::uint64_t key(std::uint32_t org, std::uint32_t product) {
        return (static_cast<std::uint64_t>(org) << 32) | product;
    }
    std::int64_t delta_of(std::size_t period, std::uint32_t org, std::uint32_t product) const;
    std::int64_t cum_of(std::size_t period, std::uint32_t org, std::uint32_t product) const;
};

CountsTable build_counts(const std::vector<PsEvent>& events, int period_length = 10);

// Directed proximity for one period: for current product i and history
// product j, phi_ij = sum_l (delta_k_il / delta_k_i) * (k_jl / k_l), the
// history-share of product j among the organizations that moved into i,
// weighted by their share of i's within-period flow. Stored as an edge
// j -> i ("history in j predicts production of i"); self-pairs are skipped.
// An entry is retained when phi_ij exceeds the global history share
// p_j = k_j / k at the period start.
struct ProximityMatrix {
    std::size_t period_index = 0;
    std::int64_t period_start = 0;
    std::vector<std::uint32_t> nodes; // products active as current or history
    // keyed (current i, history j)
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> raw;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> retained;
    std::vector<double> threshold; // p_j per product id
};

ProximityMatrix proximity(const CountsTable& counts, std::size_t period_index);

// Portfolio-weighted proximity density of one organization toward a product:
// omega = sum_h (k_hl / k_l) * phi(product <- h) over the org's history
// portfolio at the matrix's period start. Empty portfolio yields 0. The
// thresholded matrix is used unless thresholded = false.
double density(const CountsTable& counts, const ProximityMatrix& phi, const std::string& org,
               const std::string& product, bool thresholded = true);

struct NetworkStats {
    std::int64_t n_nodes = 0;
    std::int64_t n_edges = 0;
    double density_pct = 0.0;      // 100 * E / (N(N-1)/2)
    double avg_degree = 0.0;
    double std_degree = 0.0;       // population standard deviation
    double transitivity_pct = 0.0; // 100 * 3 * triangles / connected triples
    double avg_path_length = 0.0;  // mean shortest path inside the biggest component
    std::int64_t connectivity = 0; // number of connected components
    std::int64_t biggest_component = 0;
    double small_worldness = 0.0;  // (C/C_rand) / (L/L_rand), NaN when undefined
};

// Statistics of an undirected simple graph given explicitly; the baseline for
// small-worldness averages n_random Erdos-Renyi G(N, E) graphs drawn from the
// given seed. n_random < 1 throws.
NetworkStats network_stats(std::int64_t n_nodes,
                           const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                           int n_random = 100, std::uint64_t seed = 0);

// Undirected projection of the retained proximity entries.
NetworkStats network_stats(const ProximityMatrix& phi, int n_random = 100,
                           std::uint64_t seed = 0);

struct PredictionBin {
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    std::int64_t n_explorative = 0;
    std::int64_t hits_explorative = 0;
    std::int64_t n_exploitative = 0;
    std::int64_t hits_exploitative = 0;
    double p_explorative = 0.0; // NaN when the bin holds no such triples
    double p_exploitative = 0.0;
};

struct DiversificationEval {
    std::vector<PredictionBin> bins;
    std::int64_t n_triples = 0;
};

// For every (org, product, period) triple: omega from the proximity matrix of
// period q and the org's portfolio at the start of q+1, outcome = whether the
// org innovated in the product during the next horizon_periods periods,
// explorative = the product was new to the org at the start of q+1. Triples
// are pooled across period pairs and split into equal-count omega bins (ties
// broken by period, org, product). Requires at least horizon_periods + 1
// periods.
DiversificationEval evaluate_prediction(const CountsTable& counts, int horizon_periods = 1,
                                        int n_bins = 10);

// Diversification pathways: products reachable from a seed portfolio by
// following retained edges in their stored direction (history j -> predicted
// product i) within at most max_hops steps. Seeds are excluded from the
// result, which is sorted by name. Unknown seed names or max_hops < 1 throw.
std::vector<std::string> reachable_within(const CountsTable& counts, const ProximityMatrix& phi,
                                          const std::vector<std::string>& seeds, int max_hops = 2);

struct EdgeRow {
    std::string source; // history product
    std::string target; // current product
    double weight = 0.0;
    std::int64_t period = 0;
};

// CSV "source,target,weight,period", edges sorted by (source, target) within
// each period, periods ascending.
void export_network(const CountsTable& counts, const std::vector<ProximityMatrix>& mats,
                    std::ostream& os);
std::vector<EdgeRow> import_network(std::istream& is);

} // namespace innodyn::ps
