#include "innodyn/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace innodyn {

void SimParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(nu > 0.0)) fail("nu must be > 0");
    if (!(rho > 0.0)) fail("rho must be > 0");
    if (!(lambda >= 1.0)) fail("lambda must be >= 1");
    if (!(entry_rate >= 0.0)) fail("entry_rate must be >= 0");
    if (!(depth_mean > 0.0 && depth_mean <= 1.0)) fail("depth_mean must be in (0, 1]");
    if (!(scope_mean >= 0.0 && scope_mean < 1.0)) fail("scope_mean must be in [0, 1)");
    if (!(depth_jitter >= 0.0)) fail("depth_jitter must be >= 0");
    if (!(scope_jitter >= 0.0)) fail("scope_jitter must be >= 0");
    if (!(depth_mean - depth_jitter > 0.0 && depth_mean + depth_jitter <= 1.0))
        fail("depth_jitter must keep depth in (0, 1]");
    if (!(scope_mean - scope_jitter >= 0.0 && scope_mean + scope_jitter < 1.0))
        fail("scope_jitter must keep scope in [0, 1)");
    if (!(rate_cap > 0.0)) fail("rate_cap must be > 0");
    if (horizon < 1) fail("horizon must be >= 1");
    if (!(dt > 0.0)) fail("dt must be > 0");
}

double recombination_count(double d_star, double lambda) {
    if (d_star < lambda) return 0.0;
    return std::exp(std::lgamma(d_star + 1.0) - std::lgamma(lambda + 1.0) -
                    std::lgamma(d_star - lambda + 1.0));
}

AdjacentPossible adjacent_possible_size(std::uint64_t k, std::uint64_t D, double d_star,
                                        const SimParams& p) {
    if (k == 0) return {p.nu, 0.0, p.nu};
    // |R| floored at 1: below the recombination threshold the basal discovery
    // and improvement channels stay open, otherwise lambda >= 2 populations
    // would freeze at D = 1 after the first discovery.
    double r = std::max(recombination_count(d_star, p.lambda), 1.0);
    double u_new = p.nu * r;
    double u_improve = p.rho * (static_cast<double>(k) / static_cast<double>(D)) * r;
    return {u_new, u_improve, u_new + u_improve};
}

double update_search_space(double d_star, double depth, double scope, std::uint64_t D) {
    double grown = (depth / (1.0 - scope)) * d_star;
    double ceiling = static_cast<double>(D > 0 ? D : 1);
    if (grown < 1.0) return 1.0;
    if (grown > ceiling) return ceiling;
    return grown;
}

double fitness(double depth_mean, double scope_mean) {
    if (!(depth_mean > 0.0 && depth_mean <= 1.0))
        throw std::domain_error("depth_mean must be in (0, 1]");
    if (!(scope_mean >= 0.0 && scope_mean < 1.0))
        throw std::domain_error("scope_mean must be in [0, 1)");
    return std::log(depth_mean) - std::log1p(-scope_mean);
}

namespace {

double uniform_in(Rng& rng, double mid, double half_width) {
    if (half_width <= 0.0) return mid;
    std::uniform_real_distribution<double> u(mid - half_width, mid + half_width);
    return u(rng);
}

} // namespace

void step_org(OrgState& org, const SimParams& p, Rng& rng, std::int64_t t,
              std::uint32_t& next_code, std::vector<EventRecord>& events) {
    AdjacentPossible u = adjacent_possible_size(org.k, org.D, org.d_star, p);
    double mean = std::min(u.u_total * p.dt, p.rate_cap);
    std::uint64_t n = 0;
    if (mean > 0.0) {
        std::poisson_distribution<std::uint64_t> pois(mean);
        n = pois(rng);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t i = 0; i < n; ++i) {
        // Probability of a new type conditioned on the state at draw time.
        double p_new = 1.0;
        if (org.k > 0) {
            double dd = static_cast<double>(org.D);
            double kk = static_cast<double>(org.k);
            p_new = p.nu * dd / (p.nu * dd + p.rho * kk);
        }
        bool is_new = unit(rng) < p_new;
        std::uint32_t code;
        if (is_new) {
            code = next_code++;
            org.codes.push_back(code);
            org.D += 1;
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, org.codes.size() - 1);
            code = org.codes[pick(rng)];
        }
        org.k += 1;
        events.push_back({org.org_id, t, code, is_new});
    }
    if (p.regime == Regime::Weak) {
        double depth = uniform_in(rng, p.depth_mean, p.depth_jitter);
        double scope = uniform_in(rng, p.scope_mean, p.scope_jitter);
        org.d_star = update_search_space(org.d_star, depth, scope, org.D);
    } else {
        org.d_star = static_cast<double>(org.D);
    }
}

Trajectory run_population(const SimParams& p) {
    p.validate();
    Trajectory traj;
    traj.params = p;
    Rng rng = make_rng(p.seed, "engine");
    double eta = fitness(p.depth_mean, p.scope_mean);

    auto spawn = [&](std::int64_t t) {
        OrgState org;
        org.org_id = static_cast<std::uint32_t>(traj.orgs.size());
        org.birth_time = t;
        org.d_star = 1.0;
        org.eta = eta;
        traj.orgs.push_back(std::move(org));
    };

    spawn(0); // seed organization
    for (std::int64_t t = 0; t < p.horizon; ++t) {
        if (p.entry_rate > 0.0) {
            std::poisson_distribution<std::uint64_t> entry(p.entry_rate);
            std::uint64_t born = entry(rng);
            for (std::uint64_t i = 0; i < born; ++i) spawn(t);
        }
        for (OrgState& org : traj.orgs)
            step_org(org, p, rng, t, traj.n_codes, traj.events);
        for (const OrgState& org : traj.orgs)
            traj.snapshots.push_back({org.org_id, t, org.k, org.D, org.d_star});
    }
    return traj;
}

std::vector<std::pair<double, double>> heaps_pairs(const Trajectory& traj, std::uint32_t org_id) {
    std::vector<std::pair<double, double>> out;
    double k = 0.0;
    double d = 0.0;
    for (const EventRecord& e : traj.events) {
        if (e.org_id != org_id) continue;
        k += 1.0;
        if (e.is_new_type) d += 1.0;
        out.emplace_back(k, d);
    }
    return out;
}

std::vector<std::pair<double, double>> kernel_observations(const Trajectory& traj) {
    // Snapshots are written in org order within each step, so per-org series
    // are recovered by scanning for matching ids.
    std::vector<std::pair<double, double>> out;
    std::vector<Snapshot> last(traj.orgs.size());
    std::vector<bool> seen(traj.orgs.size(), false);
    for (const Snapshot& s : traj.snapshots) {
        if (seen[s.org_id]) {
            const Snapshot& prev = last[s.org_id];
            out.emplace_back(static_cast<double>(prev.k),
                             static_cast<double>(s.k - prev.k));
        }
        last[s.org_id] = s;
        seen[s.org_id] = true;
    }
    return out;
}

std::vector<double> final_k_values(const Trajectory& traj, std::uint64_t min_k) {
    std::vector<double> out;
    for (const OrgState& org : traj.orgs)
        if (org.k >= min_k) out.push_back(static_cast<double>(org.k));
    return out;
}

} // namespace innodyn
