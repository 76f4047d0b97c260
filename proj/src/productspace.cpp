#include "innodyn/productspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "innodyn/io.hpp"
#include "innodyn/rng.hpp"

namespace innodyn::ps {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t map_get(const std::unordered_map<std::uint64_t, std::int64_t>& m,
                     std::uint64_t key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

} // namespace

std::int64_t CountsTable::delta_of(std::size_t period, std::uint32_t org,
                                   std::uint32_t product) const {
    return map_get(periods.at(period).delta, key(org, product));
}

std::int64_t CountsTable::cum_of(std::size_t period, std::uint32_t org,
                                 std::uint32_t product) const {
    return map_get(periods.at(period).cum, key(org, product));
}

CountsTable build_counts(const std::vector<PsEvent>& events, int period_length) {
    if (events.empty()) throw std::invalid_argument("build_counts: no events");
    if (period_length < 1) throw std::invalid_argument("period_length must be >= 1");

    CountsTable t;
    t.period_length = period_length;
    for (const PsEvent& e : events) {
        if (t.org_id.emplace(e.org, static_cast<std::uint32_t>(t.orgs.size())).second)
            t.orgs.push_back(e.org);
        if (t.product_id.emplace(e.product, static_cast<std::uint32_t>(t.products.size())).second)
            t.products.push_back(e.product);
    }

    std::int64_t lo = events.front().year, hi = events.front().year;
    for (const PsEvent& e : events) {
        lo = std::min(lo, e.year);
        hi = std::max(hi, e.year);
    }
    const std::int64_t first = floor_div(lo, period_length) * period_length;
    const std::int64_t last = floor_div(hi, period_length) * period_length;
    const std::size_t n_periods = static_cast<std::size_t>((last - first) / period_length) + 1;
    const std::size_t n_prod = t.products.size();
    const std::size_t n_orgs = t.orgs.size();

    t.periods.resize(n_periods);
    for (std::size_t q = 0; q < n_periods; ++q) {
        t.periods[q].start = first + static_cast<std::int64_t>(q) * period_length;
        t.periods[q].delta_by_product.assign(n_prod, 0);
        t.periods[q].cum_by_product.assign(n_prod, 0);
        t.periods[q].cum_by_org.assign(n_orgs, 0);
    }
    for (const PsEvent& e : events) {
        const std::size_t q = static_cast<std::size_t>(
            (floor_div(e.year, period_length) * period_length - first) / period_length);
        const std::uint32_t o = t.org_id.at(e.org);
        const std::uint32_t p = t.product_id.at(e.product);
        t.periods[q].delta[CountsTable::key(o, p)] += 1;
        t.periods[q].delta_by_product[p] += 1;
    }
    // Cumulative history strictly before each period start.
    for (std::size_t q = 1; q < n_periods; ++q) {
        auto& cur = t.periods[q];
        const auto& prev = t.periods[q - 1];
        cur.cum = prev.cum;
        for (const auto& [k, c] : prev.delta) cur.cum[k] += c;
        cur.cum_by_product = prev.cum_by_product;
        cur.cum_by_org = prev.cum_by_org;
        cur.cum_total = prev.cum_total;
        for (const auto& [k, c] : prev.delta) {
            cur.cum_by_org[static_cast<std::uint32_t>(k >> 32)] += c;
            cur.cum_by_product[static_cast<std::uint32_t>(k & 0xffffffffu)] += c;
            cur.cum_total += c;
        }
    }
    return t;
}

ProximityMatrix proximity(const CountsTable& counts, std::size_t period_index) {
    if (period_index >= counts.periods.size())
        throw std::invalid_argument("proximity: period_index out of range");
    const auto& pc = counts.periods[period_index];
    const std::size_t n_prod = counts.products.size();

    ProximityMatrix out;
    out.period_index = period_index;
    out.period_start = pc.start;
    out.threshold.assign(n_prod, 0.0);
    if (pc.cum_total > 0)
        for (std::size_t j = 0; j < n_prod; ++j)
            out.threshold[j] = static_cast<double>(pc.cum_by_product[j]) /
                               static_cast<double>(pc.cum_total);

    // Portfolio shares k_jl / k_l per org, and within-period flows per product.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> hist_share(counts.orgs.size());
    for (const auto& [k, c] : pc.cum) {
        const std::uint32_t o = static_cast<std::uint32_t>(k >> 32);
        const std::uint32_t p = static_cast<std::uint32_t>(k & 0xffffffffu);
        if (c > 0 && pc.cum_by_org[o] > 0)
            hist_share[o].emplace_back(
                p, static_cast<double>(c) / static_cast<double>(pc.cum_by_org[o]));
    }
    for (const auto& [k, c] : pc.delta) {
        const std::uint32_t o = static_cast<std::uint32_t>(k >> 32);
        const std::uint32_t i = static_cast<std::uint32_t>(k & 0xffffffffu);
        if (c <= 0 || pc.delta_by_product[i] <= 0) continue;
        const double w = static_cast<double>(c) / static_cast<double>(pc.delta_by_product[i]);
        for (const auto& [j, share] : hist_share[o]) {
            if (j == i) continue; // self-proximity is not an edge
            out.raw[{i, j}] += w * share;
        }
    }
    for (const auto& [ij, phi] : out.raw)
        if (phi > out.threshold[ij.second]) out.retained[ij] = phi;

    std::set<std::uint32_t> nodes;
    for (std::size_t p = 0; p < n_prod; ++p) {
        if (pc.delta_by_product[p] > 0 || pc.cum_by_product[p] > 0)
            nodes.insert(static_cast<std::uint32_t>(p));
    }
    out.nodes.assign(nodes.begin(), nodes.end());
    return out;
}

namespace {

using Portfolio = std::vector<std::pair<std::uint32_t, double>>; // (product, share)

// History shares k_hl / k_l for every org at one period's start, in one pass.
std::vector<Portfolio> org_portfolios(const CountsTable& counts, std::size_t period) {
    const auto& pc = counts.periods.at(period);
    std::vector<Portfolio> pf(counts.orgs.size());
    for (const auto& [k, c] : pc.cum) {
        const std::uint32_t o = static_cast<std::uint32_t>(k >> 32);
        if (c > 0 && pc.cum_by_org[o] > 0)
            pf[o].emplace_back(static_cast<std::uint32_t>(k & 0xffffffffu),
                               static_cast<double>(c) / static_cast<double>(pc.cum_by_org[o]));
    }
    return pf;
}

double omega_from(const Portfolio& pf, const ProximityMatrix& phi, std::uint32_t product,
                  bool thresholded) {
    const auto& entries = thresholded ? phi.retained : phi.raw;
    double omega = 0.0;
    for (const auto& [h, share] : pf) {
        auto it = entries.find({product, h});
        if (it != entries.end()) omega += share * it->second;
    }
    return omega;
}

} // namespace

double density(const CountsTable& counts, const ProximityMatrix& phi, const std::string& org,
               const std::string& product, bool thresholded) {
    auto oit = counts.org_id.find(org);
    if (oit == counts.org_id.end()) throw std::invalid_argument("density: unknown org");
    auto pit = counts.product_id.find(product);
    if (pit == counts.product_id.end()) throw std::invalid_argument("density: unknown product");
    const auto& pc = counts.periods.at(phi.period_index);
    Portfolio pf;
    for (const auto& [k, c] : pc.cum) {
        if (static_cast<std::uint32_t>(k >> 32) != oit->second || c <= 0) continue;
        pf.emplace_back(static_cast<std::uint32_t>(k & 0xffffffffu),
                        static_cast<double>(c) /
                            static_cast<double>(pc.cum_by_org[oit->second]));
    }
    return omega_from(pf, phi, pit->second, thresholded);
}

namespace {

struct Graph {
    std::int64_t n = 0;
    std::vector<std::vector<std::int32_t>> adj;

    explicit Graph(std::int64_t n_nodes) : n(n_nodes), adj(static_cast<std::size_t>(n_nodes)) {}
    void add_edge(std::int32_t a, std::int32_t b) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    void finish() {
        for (auto& v : adj) std::sort(v.begin(), v.end());
    }
};

struct PathInfo {
    std::uint64_t dist_sum = 0; // over unordered pairs in the biggest component
    std::uint64_t pair_count = 0;
    std::int64_t components = 0;
    std::int64_t biggest = 0;
};

PathInfo paths_and_components(const Graph& g) {
    PathInfo info;
    std::vector<std::int32_t> comp(static_cast<std::size_t>(g.n), -1);
    std::vector<std::vector<std::int32_t>> members;
    for (std::int32_t s = 0; s < g.n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        const std::int32_t id = static_cast<std::int32_t>(members.size());
        members.emplace_back();
        std::queue<std::int32_t> q;
        q.push(s);
        comp[static_cast<std::size_t>(s)] = id;
        while (!q.empty()) {
            const std::int32_t v = q.front();
            q.pop();
            members.back().push_back(v);
            for (std::int32_t w : g.adj[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = id;
                    q.push(w);
                }
            }
        }
    }
    info.components = static_cast<std::int64_t>(members.size());
    std::size_t big = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i].size() > members[big].size()) big = i;
    if (!members.empty()) info.biggest = static_cast<std::int64_t>(members[big].size());

    if (info.biggest >= 2) {
        std::vector<std::int32_t> dist(static_cast<std::size_t>(g.n));
        for (std::int32_t s : members[big]) {
            std::fill(dist.begin(), dist.end(), -1);
            dist[static_cast<std::size_t>(s)] = 0;
            std::queue<std::int32_t> q;
            q.push(s);
            while (!q.empty()) {
                const std::int32_t v = q.front();
                q.pop();
                for (std::int32_t w : g.adj[static_cast<std::size_t>(v)]) {
                    if (dist[static_cast<std::size_t>(w)] < 0) {
                        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                        q.push(w);
                    }
                }
            }
            for (std::int32_t v : members[big])
                if (v > s) info.dist_sum += static_cast<std::uint64_t>(dist[static_cast<std::size_t>(v)]);
        }
        info.pair_count = static_cast<std::uint64_t>(info.biggest) *
                          static_cast<std::uint64_t>(info.biggest - 1) / 2;
    }
    return info;
}

// transitivity as a fraction, plus degree stats
struct LocalStats {
    double transitivity = 0.0;
    double avg_degree = 0.0;
    double std_degree = 0.0;
    std::uint64_t triangles = 0;
    std::uint64_t triples = 0;
};

LocalStats clustering(const Graph& g) {
    LocalStats s;
    std::uint64_t deg_sum = 0, deg_sq = 0;
    for (const auto& nb : g.adj) {
        const std::uint64_t d = nb.size();
        deg_sum += d;
        deg_sq += d * d;
        s.triples += d * (d - 1) / 2;
    }
    // Each triangle is seen from its three corners via sorted adjacency scans.
    std::uint64_t tri3 = 0;
    for (std::int32_t v = 0; v < g.n; ++v) {
        const auto& nv = g.adj[static_cast<std::size_t>(v)];
        for (std::int32_t w : nv) {
            if (w <= v) continue;
            const auto& nw = g.adj[static_cast<std::size_t>(w)];
            std::size_t a = 0, b = 0;
            while (a < nv.size() && b < nw.size()) {
                if (nv[a] < nw[b]) ++a;
                else if (nv[a] > nw[b]) ++b;
                else {
                    if (nv[a] > w) ++tri3;
                    ++a;
                    ++b;
                }
            }
        }
    }
    s.triangles = tri3;
    if (g.n > 0) {
        const double n = static_cast<double>(g.n);
        s.avg_degree = static_cast<double>(deg_sum) / n;
        double var = static_cast<double>(deg_sq) / n - s.avg_degree * s.avg_degree;
        s.std_degree = std::sqrt(std::max(var, 0.0));
    }
    if (s.triples > 0)
        s.transitivity = 3.0 * static_cast<double>(s.triangles) / static_cast<double>(s.triples);
    return s;
}

Graph random_gnm(std::int64_t n, std::int64_t e, innodyn::Rng& rng) {
    Graph g(n);
    const std::uint64_t max_pairs = static_cast<std::uint64_t>(n) *
                                    static_cast<std::uint64_t>(n > 0 ? n - 1 : 0) / 2;
    std::set<std::uint64_t> chosen;
    std::uniform_int_distribution<std::int64_t> pick(0, n > 0 ? n - 1 : 0);
    while (chosen.size() < static_cast<std::size_t>(e) && chosen.size() < max_pairs) {
        std::int64_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        chosen.insert(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) +
                      static_cast<std::uint64_t>(b));
    }
    for (std::uint64_t key : chosen)
        g.add_edge(static_cast<std::int32_t>(key / static_cast<std::uint64_t>(n)),
                   static_cast<std::int32_t>(key % static_cast<std::uint64_t>(n)));
    g.finish();
    return g;
}

} // namespace

NetworkStats network_stats(std::int64_t n_nodes,
                           const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                           int n_random, std::uint64_t seed) {
    if (n_random < 1) throw std::invalid_argument("network_stats: n_random must be >= 1");
    if (n_nodes < 0) throw std::invalid_argument("network_stats: negative node count");

    Graph g(n_nodes);
    std::set<std::pair<std::uint32_t, std::uint32_t>> dedup;
    for (auto [a, b] : edges) {
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (static_cast<std::int64_t>(b) >= n_nodes)
            throw std::invalid_argument("network_stats: edge endpoint out of range");
        dedup.emplace(a, b);
    }
    for (auto [a, b] : dedup)
        g.add_edge(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
    g.finish();

    NetworkStats out;
    out.n_nodes = n_nodes;
    out.n_edges = static_cast<std::int64_t>(dedup.size());
    const LocalStats ls = clustering(g);
    const PathInfo pi = paths_and_components(g);
    const double max_pairs = static_cast<double>(n_nodes) * static_cast<double>(n_nodes - 1) / 2.0;
    out.density_pct = max_pairs > 0.0 ? 100.0 * static_cast<double>(out.n_edges) / max_pairs : 0.0;
    out.avg_degree = ls.avg_degree;
    out.std_degree = ls.std_degree;
    out.transitivity_pct = 100.0 * ls.transitivity;
    out.avg_path_length = pi.pair_count > 0
                              ? static_cast<double>(pi.dist_sum) / static_cast<double>(pi.pair_count)
                              : 0.0;
    out.connectivity = pi.components;
    out.biggest_component = pi.biggest;

    double c_rand = 0.0, l_rand = 0.0;
    std::int64_t l_samples = 0;
    for (int r = 0; r < n_random; ++r) {
        innodyn::Rng rng = innodyn::make_rng(seed, "er-baseline-" + std::to_string(r));
        Graph er = random_gnm(n_nodes, out.n_edges, rng);
        c_rand += clustering(er).transitivity;
        const PathInfo epi = paths_and_components(er);
        if (epi.pair_count > 0) {
            l_rand += static_cast<double>(epi.dist_sum) / static_cast<double>(epi.pair_count);
            ++l_samples;
        }
    }
    c_rand /= static_cast<double>(n_random);
    l_rand = l_samples > 0 ? l_rand / static_cast<double>(l_samples) : 0.0;
    if (c_rand > 0.0 && l_rand > 0.0 && out.avg_path_length > 0.0) {
        out.small_worldness = (ls.transitivity / c_rand) / (out.avg_path_length / l_rand);
    } else {
        out.small_worldness = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

NetworkStats network_stats(const ProximityMatrix& phi, int n_random, std::uint64_t seed) {
    if (phi.nodes.size() < 2)
        throw std::invalid_argument("network_stats needs at least 2 nodes");
    // Project retained directed entries onto compacted undirected nodes.
    std::map<std::uint32_t, std::uint32_t> index;
    for (std::uint32_t p : phi.nodes)
        index.emplace(p, static_cast<std::uint32_t>(index.size()));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [ij, w] : phi.retained) {
        auto a = index.find(ij.first);
        auto b = index.find(ij.second);
        if (a == index.end() || b == index.end()) continue;
        edges.emplace_back(a->second, b->second);
    }
    return network_stats(static_cast<std::int64_t>(index.size()), edges, n_random, seed);
}

DiversificationEval evaluate_prediction(const CountsTable& counts, int horizon_periods,
                                        int n_bins) {
    if (horizon_periods < 1)
        throw std::invalid_argument("evaluate_prediction: horizon_periods must be >= 1");
    if (counts.periods.size() < static_cast<std::size_t>(horizon_periods) + 1)
        throw std::invalid_argument("evaluate_prediction needs at least 2 periods");
    if (n_bins < 1) throw std::invalid_argument("evaluate_prediction: n_bins must be >= 1");

    struct Triple {
        double omega = 0.0;
        std::size_t period = 0;
        std::uint32_t org = 0;
        std::uint32_t product = 0;
        bool explorative = false;
        bool hit = false;
    };
    std::vector<Triple> triples;
    const std::size_t h = static_cast<std::size_t>(horizon_periods);
    for (std::size_t q = 0; q + h < counts.periods.size(); ++q) {
        const ProximityMatrix phi = proximity(counts, q);
        const auto& next = counts.periods[q + 1];
        const std::vector<Portfolio> pf = org_portfolios(counts, q + 1);
        for (std::uint32_t org = 0; org < counts.orgs.size(); ++org) {
            if (next.cum_by_org[org] <= 0) continue;
            for (std::uint32_t prod : phi.nodes) {
                Triple tr;
                tr.omega = omega_from(pf[org], phi, prod, true);
                tr.period = q;
                tr.org = org;
                tr.product = prod;
                tr.explorative = counts.cum_of(q + 1, org, prod) == 0;
                for (std::size_t w = 1; w <= h && !tr.hit; ++w)
                    tr.hit = counts.delta_of(q + w, org, prod) > 0;
                triples.push_back(tr);
            }
        }
    }
    if (triples.empty())
        throw std::invalid_argument("evaluate_prediction: no evaluable triples");

    std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
        if (a.omega != b.omega) return a.omega < b.omega;
        if (a.period != b.period) return a.period < b.period;
        if (a.org != b.org) return a.org < b.org;
        return a.product < b.product;
    });

    DiversificationEval out;
    out.n_triples = static_cast<std::int64_t>(triples.size());
    const std::size_t n = triples.size();
    const std::size_t bins = static_cast<std::size_t>(n_bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t first = n * b / bins;
        const std::size_t last = n * (b + 1) / bins;
        if (first >= last) continue;
        PredictionBin pb;
        pb.omega_lo = triples[first].omega;
        pb.omega_hi = triples[last - 1].omega;
        for (std::size_t i = first; i < last; ++i) {
            const Triple& tr = triples[i];
            if (tr.explorative) {
                ++pb.n_explorative;
                if (tr.hit) ++pb.hits_explorative;
            } else {
                ++pb.n_exploitative;
                if (tr.hit) ++pb.hits_exploitative;
            }
        }
        pb.p_explorative = pb.n_explorative > 0
                               ? static_cast<double>(pb.hits_explorative) /
                                     static_cast<double>(pb.n_explorative)
                               : std::numeric_limits<double>::quiet_NaN();
        pb.p_exploitative = pb.n_exploitative > 0
                                ? static_cast<double>(pb.hits_exploitative) /
                                      static_cast<double>(pb.n_exploitative)
                                : std::numeric_limits<double>::quiet_NaN();
        out.bins.push_back(pb);
    }
    return out;
}

std::vector<std::string> reachable_within(const CountsTable& counts, const ProximityMatrix& phi,
                                          const std::vector<std::string>& seeds, int max_hops) {
    if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
    std::vector<std::uint32_t> frontier;
    std::vector<char> seen(counts.products.size(), 0);
    std::vector<char> is_seed(counts.products.size(), 0);
    for (const std::string& s : seeds) {
        auto it = counts.product_id.find(s);
        if (it == counts.product_id.end())
            throw std::invalid_argument("unknown seed product: " + s);
        if (!seen[it->second]) {
            seen[it->second] = 1;
            is_seed[it->second] = 1;
            frontier.push_back(it->second);
        }
    }
    std::vector<std::vector<std::uint32_t>> adj(counts.products.size());
    for (const auto& [ij, w] : phi.retained) adj[ij.second].push_back(ij.first);
    for (int hop = 0; hop < max_hops && !frontier.empty(); ++hop) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t j : frontier)
            for (std::uint32_t i : adj[j])
                if (!seen[i]) {
                    seen[i] = 1;
                    next.push_back(i);
                }
        frontier = std::move(next);
    }
    std::vector<std::string> out;
    for (std::size_t p = 0; p < seen.size(); ++p)
        if (seen[p] && !is_seed[p]) out.push_back(counts.products[p]);
    std::sort(out.begin(), out.end());
    return out;
}

void export_network(const CountsTable& counts, const std::vector<ProximityMatrix>& mats,
                    std::ostream& os) {
    os << "source,target,weight,period\n";
    for (const ProximityMatrix& phi : mats) {
        std::vector<EdgeRow> rows;
        for (const auto& [ij, w] : phi.retained)
            rows.push_back({counts.products[ij.second], counts.products[ij.first], w,
                            phi.period_start});
        std::sort(rows.begin(), rows.end(), [](const EdgeRow& a, const EdgeRow& b) {
            if (a.source != b.source) return a.source < b.source;
            return a.target < b.target;
        });
        for (const EdgeRow& r : rows)
            os << r.source << ',' << r.target << ',' << innodyn::fmt_double(r.weight) << ','
               << r.period << '\n';
    }
}

std::vector<EdgeRow> import_network(std::istream& is) {
    std::vector<EdgeRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "source,target,weight,period")
                throw std::invalid_argument("import_network: bad header on line 1");
            continue;
        }
        std::stringstream ss(line);
        EdgeRow r;
        std::string weight, period;
        if (!std::getline(ss, r.source, ',') || !std::getline(ss, r.target, ',') ||
            !std::getline(ss, weight, ',') || !std::getline(ss, period, ','))
            throw std::invalid_argument("import_network: expected 4 fields on line " +
                                        std::to_string(lineno));
        try {
            r.weight = std::stod(weight);
            r.period = std::stoll(period);
        } catch (const std::exception&) {
            throw std::invalid_argument("import_network: bad number on line " +
                                        std::to_string(lineno));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace innodyn::ps
