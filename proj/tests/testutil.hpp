#pragma once

// Shared fixtures and independent oracles for the test suite. Everything here
// is deliberately naive and shares no code with the library paths under test:
// brute-force graph metrics, fixed-step ODE integration, and hand-rolled
// synthetic processes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "innodyn/kernel.hpp"
#include "innodyn/productspace.hpp"

namespace testutil {

// ---------------------------------------------------------------- graphs

struct BruteGraphStats {
    std::int64_t n_nodes = 0;
    std::int64_t n_edges = 0;
    std::int64_t triangles = 0;
    std::int64_t triples = 0; // connected triples (paths of length 2)
    std::int64_t components = 0;
    std::int64_t biggest = 0;
    double avg_path = 0.0; // mean pairwise distance inside the biggest component
    double density_pct = 0.0;
    double avg_degree = 0.0;
    double std_degree = 0.0;
    double transitivity_pct = 0.0;
};

// Adjacency-matrix triangle enumeration plus all-pairs BFS.
inline BruteGraphStats
brute_graph_stats(std::int64_t n,
                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    BruteGraphStats st;
    st.n_nodes = n;
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(n),
                                       std::vector<char>(static_cast<std::size_t>(n), 0));
    for (const auto& [a, b] : edges) {
        if (a == b) continue;
        if (!adj[a][b]) ++st.n_edges;
        adj[a][b] = adj[b][a] = 1;
    }
    std::vector<std::int64_t> deg(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                ++deg[static_cast<std::size_t>(i)];
    for (std::int64_t i = 0; i < n; ++i) {
        st.avg_degree += static_cast<double>(deg[static_cast<std::size_t>(i)]);
        st.triples += deg[static_cast<std::size_t>(i)] * (deg[static_cast<std::size_t>(i)] - 1) / 2;
    }
    if (n > 0) st.avg_degree /= static_cast<double>(n);
    double ss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg[static_cast<std::size_t>(i)]) - st.avg_degree;
        ss += d * d;
    }
    st.std_degree = n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i + 1; j < n; ++j)
            for (std::int64_t k = j + 1; k < n; ++k)
                if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                    adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] &&
                    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                    ++st.triangles;
    if (n > 1)
        st.density_pct = 100.0 * static_cast<double>(st.n_edges) /
                         (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
    st.transitivity_pct =
        st.triples > 0
            ? 100.0 * 3.0 * static_cast<double>(st.triangles) / static_cast<double>(st.triples)
            : 0.0;

    // components by BFS
    std::vector<std::int64_t> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<std::int64_t>> members;
    for (std::int64_t s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        const std::int64_t c = st.components++;
        members.emplace_back();
        std::queue<std::int64_t> q;
        q.push(s);
        comp[static_cast<std::size_t>(s)] = c;
        while (!q.empty()) {
            const std::int64_t v = q.front();
            q.pop();
            members[static_cast<std::size_t>(c)].push_back(v);
            for (std::int64_t w = 0; w < n; ++w)
                if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] &&
                    comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = c;
                    q.push(w);
                }
        }
    }
    std::size_t big = 0;
    for (std::size_t c = 0; c < members.size(); ++c)
        if (members[c].size() > members[big].size()) big = c;
    st.biggest = members.empty() ? 0 : static_cast<std::int64_t>(members[big].size());

    // all-pairs BFS inside the biggest component
    if (st.biggest > 1) {
        std::int64_t dist_sum = 0, pairs = 0;
        for (std::int64_t s : members[big]) {
            std::vector<std::int64_t> dist(static_cast<std::size_t>(n), -1);
            std::queue<std::int64_t> q;
            q.push(s);
            dist[static_cast<std::size_t>(s)] = 0;
            while (!q.empty()) {
                const std::int64_t v = q.front();
                q.pop();
                for (std::int64_t w = 0; w < n; ++w)
                    if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] &&
                        dist[static_cast<std::size_t>(w)] < 0) {
                        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                        q.push(w);
                    }
            }
            for (std::int64_t v : members[big])
                if (v > s) {
                    dist_sum += dist[static_cast<std::size_t>(v)];
                    ++pairs;
                }
        }
        st.avg_path = static_cast<double>(dist_sum) / static_cast<double>(pairs);
    }
    return st;
}

// Erdos-Renyi G(n, p) edge list on its own generator, nodes 0..n-1.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>>
random_graph(std::int64_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < static_cast<std::uint32_t>(n); ++i)
        for (std::uint32_t j = i + 1; j < static_cast<std::uint32_t>(n); ++j)
            if (unit(rng) < p) edges.emplace_back(i, j);
    return edges;
}

// ------------------------------------------------------------- ODE oracle

// Fixed-step classic RK4 for dD/dk = nu*D / (nu*D + rho*k), started at
// (k0, d0), reporting D at each ascending target k. The step is subdivided
// so the integration lands exactly on every target.
inline std::vector<double> rk4_reference(double nu, double rho, double k0, double d0,
                                         const std::vector<double>& k_targets, double h) {
    auto f = [&](double k, double d) { return nu * d / (nu * d + rho * k); };
    std::vector<double> out;
    double k = k0, d = d0;
    for (double kt : k_targets) {
        while (k < kt) {
            const double step = std::min(h, kt - k);
            const double s1 = f(k, d);
            const double s2 = f(k + 0.5 * step, d + 0.5 * step * s1);
            const double s3 = f(k + 0.5 * step, d + 0.5 * step * s2);
            const double s4 = f(k + step, d + step * s3);
            d += step / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
            k += step;
        }
        out.push_back(d);
    }
    return out;
}

// -------------------------------------------------------- kernel fixtures

// Pure Yule process: each organization starts at k = 1 and gains
// Poisson(rho * k) events per step, so the true kernel exponent is 1.
inline std::vector<innodyn::laws::KernelObs> yule_process(int n_orgs, int n_steps, double rho,
                                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<innodyn::laws::KernelObs> obs;
    for (int o = 0; o < n_orgs; ++o) {
        double k = 1.0;
        for (int t = 0; t < n_steps; ++t) {
            std::poisson_distribution<int> pois(rho * k);
            const int n = pois(rng);
            obs.push_back({static_cast<std::uint32_t>(o), k, static_cast<double>(n)});
            k += n;
        }
    }
    return obs;
}

// Constant-rate process: events arrive independently of k, exponent 0.
inline std::vector<innodyn::laws::KernelObs> flat_process(int n_orgs, int n_steps, double rate,
                                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::poisson_distribution<int> pois(rate);
    std::vector<innodyn::laws::KernelObs> obs;
    for (int o = 0; o < n_orgs; ++o) {
        double k = 1.0;
        for (int t = 0; t < n_steps; ++t) {
            const int n = pois(rng);
            obs.push_back({static_cast<std::uint32_t>(o), k, static_cast<double>(n)});
            k += n;
        }
    }
    return obs;
}

// ------------------------------------------------- diversification panel

// Synthetic multi-year event panel in which the probability that an
// organization adds a product it does not yet hold is proportional to its
// current proximity density toward that product. Organizations sit in
// clusters sharing home products, which is what creates the proximity
// structure in the first place. Held products are re-emitted every year so
// portfolios persist. Year 0 seeds each organization with three home-cluster
// products; adds never happen at zero density, so the low-density prediction
// bins have an exact zero floor.
inline std::vector<innodyn::ps::PsEvent> biased_panel(std::uint64_t seed, int n_orgs = 150,
                                                      int n_clusters = 3,
                                                      int products_per_cluster = 8,
                                                      int n_years = 7, double strength = 0.6) {
    namespace ps = innodyn::ps;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n_products = n_clusters * products_per_cluster;
    auto product_name = [&](int p) {
        return "c" + std::to_string(p / products_per_cluster) + "_p" +
               std::to_string(p % products_per_cluster);
    };
    auto org_name = [](int o) { return "org" + std::to_string(o); };

    std::vector<ps::PsEvent> events;
    std::vector<std::vector<char>> held(static_cast<std::size_t>(n_orgs),
                                        std::vector<char>(static_cast<std::size_t>(n_products), 0));
    for (int o = 0; o < n_orgs; ++o) {
        const int cluster = o % n_clusters;
        const int start = (o / n_clusters) % products_per_cluster;
        for (int j = 0; j < 3; ++j) {
            const int p = cluster * products_per_cluster + (start + j) % products_per_cluster;
            held[static_cast<std::size_t>(o)][static_cast<std::size_t>(p)] = 1;
            for (int rep = 0; rep < 2; ++rep)
                events.push_back({org_name(o), 0, product_name(p)});
        }
    }
    for (int year = 1; year < n_years; ++year) {
        const ps::CountsTable counts = ps::build_counts(events, 1);
        const ps::ProximityMatrix phi = ps::proximity(counts, counts.periods.size() - 1);
        std::vector<ps::PsEvent> added;
        for (int o = 0; o < n_orgs; ++o) {
            for (int p = 0; p < n_products; ++p) {
                if (held[static_cast<std::size_t>(o)][static_cast<std::size_t>(p)]) {
                    added.push_back({org_name(o), year, product_name(p)});
                } else {
                    const double omega = ps::density(counts, phi, org_name(o), product_name(p));
                    if (unit(rng) < std::min(1.0, strength * omega)) {
                        held[static_cast<std::size_t>(o)][static_cast<std::size_t>(p)] = 1;
                        added.push_back({org_name(o), year, product_name(p)});
                    }
                }
            }
        }
        events.insert(events.end(), added.begin(), added.end());
    }
    return events;
}

// Null model: permute the product labels among the events of each year,
// preserving the per-year product totals and each organization's event count
// while destroying the org-product linkage.
inline std::vector<innodyn::ps::PsEvent>
shuffle_product_labels(std::vector<innodyn::ps::PsEvent> events, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> years;
    for (const auto& e : events) years.push_back(e.year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    for (std::int64_t y : years) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < events.size(); ++i)
            if (events[i].year == y) idx.push_back(i);
        std::vector<std::string> labels;
        labels.reserve(idx.size());
        for (std::size_t i : idx) labels.push_back(events[i].product);
        std::shuffle(labels.begin(), labels.end(), rng);
        for (std::size_t j = 0; j < idx.size(); ++j) events[idx[j]].product = std::move(labels[j]);
    }
    return events;
}

// ------------------------------------------------------------ statistics

// One-sample Kolmogorov statistic against U(0, 1).
inline double ks_uniform_stat(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, p[i] - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - p[i]);
    }
    return d;
}

// Largest |z| of per-bin explorative probabilities against the pooled rate;
// bins without explorative triples are skipped.
inline double worst_bin_z(const innodyn::ps::DiversificationEval& ev) {
    std::int64_t hits = 0, n = 0;
    for (const auto& b : ev.bins) {
        hits += b.hits_explorative;
        n += b.n_explorative;
    }
    if (n == 0) return 0.0;
    const double base = static_cast<double>(hits) / static_cast<double>(n);
    double worst = 0.0;
    for (const auto& b : ev.bins) {
        if (b.n_explorative == 0) continue;
        const double se =
            std::sqrt(std::max(base * (1.0 - base), 1e-12) / static_cast<double>(b.n_explorative));
        worst = std::max(worst, std::abs(b.p_explorative - base) / se);
    }
    return worst;
}

} // namespace testutil
