#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <vector>

#include <gsl/gsl_sf_gamma.h>

#include "doctest.h"

#include "innodyn/engine.hpp"
#include "innodyn/io.hpp"
#include "innodyn/kernel.hpp"
#include "innodyn/linfit.hpp"

using namespace innodyn;

TEST_SUITE("engine") {

TEST_CASE("recombination_count matches the Gamma-extended binomial") {
    CHECK(recombination_count(4.0, 2.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(recombination_count(6.5, 2.0) == doctest::Approx(17.875).epsilon(1e-12));
    CHECK(recombination_count(1.0, 2.0) == 0.0);  // below threshold
    CHECK(recombination_count(0.0, 1.0) == 0.0);
    CHECK(recombination_count(7.0, 1.0) == doctest::Approx(7.0).epsilon(1e-12));

    // independent oracle: Gamma(d+1) / (Gamma(l+1) Gamma(d-l+1))
    for (double d : {2.0, 3.5, 5.0, 9.25, 40.0}) {
        for (double l : {1.0, 2.0, 3.0}) {
            if (d < l) continue;
            const double want = std::exp(gsl_sf_lngamma(d + 1.0) - gsl_sf_lngamma(l + 1.0) -
                                         gsl_sf_lngamma(d - l + 1.0));
            CHECK(recombination_count(d, l) == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("adjacent_possible_size rates") {
    SimParams p;
    p.nu = 0.1;
    p.rho = 0.5;
    p.lambda = 2.0;
    const AdjacentPossible u = adjacent_possible_size(8, 4, 4.0, p);
    CHECK(u.u_new == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(u.u_improve == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(u.u_total == doctest::Approx(6.6).epsilon(1e-12));

    // empty organization: pure seeding channel
    const AdjacentPossible seed = adjacent_possible_size(0, 0, 1.0, p);
    CHECK(seed.u_new == doctest::Approx(p.nu));
    CHECK(seed.u_improve == 0.0);
    CHECK(seed.u_total == doctest::Approx(p.nu));

    // nu = 0 with D >= lambda never diversifies
    SimParams z = p;
    z.nu = 0.0;
    const AdjacentPossible uz = adjacent_possible_size(5, 5, 5.0, z);
    CHECK(uz.u_new == 0.0);
    CHECK(uz.u_improve == doctest::Approx(0.5 * 1.0 * recombination_count(5.0, 2.0)));

    // below the recombination threshold |R| is floored at 1
    const AdjacentPossible fl = adjacent_possible_size(3, 1, 1.0, p);
    CHECK(fl.u_new == doctest::Approx(p.nu));
    CHECK(fl.u_improve == doctest::Approx(p.rho * 3.0));
}

TEST_CASE("update_search_space clamps to [1, max(D, 1)]") {
    CHECK(update_search_space(10.0, 0.8, 0.2, 100) == doctest::Approx(10.0)); // fixed point
    CHECK(update_search_space(10.0, 1.0, 0.5, 40) == doctest::Approx(20.0));
    CHECK(update_search_space(10.0, 0.9, 0.5, 12) == doctest::Approx(12.0)); // ceiling binds
    CHECK(update_search_space(1.0, 0.5, 0.0, 100) == doctest::Approx(1.0));  // floor binds
    CHECK(update_search_space(5.0, 1.0, 0.9, 0) == doctest::Approx(1.0));    // D = 0 ceiling is 1
}

TEST_CASE("fitness closed form and domain") {
    CHECK(fitness(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(fitness(0.9, 0.5) == doctest::Approx(std::log(1.8)).epsilon(1e-12));
    CHECK(fitness(0.5, 0.0) < 0.0);
    CHECK_THROWS_AS(fitness(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(fitness(1.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(fitness(0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(fitness(0.5, -0.1), std::domain_error);
}

TEST_CASE("SimParams validation names the offending field") {
    SimParams p;
    p.nu = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "nu must be > 0", std::invalid_argument);
    p = SimParams{};
    p.rho = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), "rho must be > 0", std::invalid_argument);
    p = SimParams{};
    p.lambda = 0.5;
    CHECK_THROWS_WITH_AS(p.validate(), "lambda must be >= 1", std::invalid_argument);
    p = SimParams{};
    p.depth_mean = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "depth_mean must be in (0, 1]", std::invalid_argument);
    p = SimParams{};
    p.scope_mean = 1.0;
    CHECK_THROWS_WITH_AS(p.validate(), "scope_mean must be in [0, 1)", std::invalid_argument);
    p = SimParams{};
    p.depth_mean = 0.9;
    p.depth_jitter = 0.2;
    CHECK_THROWS_WITH_AS(p.validate(), "depth_jitter must keep depth in (0, 1]",
                         std::invalid_argument);
    p = SimParams{};
    p.scope_mean = 0.1;
    p.scope_jitter = 0.2;
    CHECK_THROWS_WITH_AS(p.validate(), "scope_jitter must keep scope in [0, 1)",
                         std::invalid_argument);
    p = SimParams{};
    p.horizon = 0;
    CHECK_THROWS_WITH_AS(p.validate(), "horizon must be >= 1", std::invalid_argument);
    p = SimParams{};
    p.dt = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "dt must be > 0", std::invalid_argument);
    p = SimParams{};
    p.rate_cap = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "rate_cap must be > 0", std::invalid_argument);
}

static SimParams small_run_params() {
    SimParams p;
    p.nu = 0.5;
    p.rho = 1.0;
    p.lambda = 2.0;
    p.entry_rate = 0.2;
    p.regime = Regime::Weak;
    p.horizon = 300;
    p.seed = 7;
    return p;
}

TEST_CASE("trajectory conserves counts") {
    const Trajectory traj = run_population(small_run_params());
    REQUIRE(!traj.events.empty());
    std::vector<std::uint64_t> k(traj.orgs.size(), 0), d(traj.orgs.size(), 0);
    std::vector<std::uint32_t> max_code(traj.orgs.size(), 0);
    for (const EventRecord& e : traj.events) {
        ++k[e.org_id];
        if (e.is_new_type) ++d[e.org_id];
        CHECK(e.product_code < traj.n_codes);
    }
    for (const OrgState& org : traj.orgs) {
        CHECK(org.k == k[org.org_id]);
        CHECK(org.D == d[org.org_id]);
        CHECK(org.improvements() == org.k - org.D);
        CHECK(org.codes.size() == org.D);
    }
    // final snapshot row agrees with the final state
    std::map<std::uint32_t, Snapshot> last;
    for (const Snapshot& s : traj.snapshots) last[s.org_id] = s;
    for (const OrgState& org : traj.orgs) {
        const Snapshot& s = last.at(org.org_id);
        CHECK(s.k == org.k);
        CHECK(s.D == org.D);
        CHECK(s.d_star == doctest::Approx(org.d_star));
    }
}

TEST_CASE("weak regime keeps d_star within [1, max(D, 1)]") {
    const Trajectory traj = run_population(small_run_params());
    for (const Snapshot& s : traj.snapshots) {
        CHECK(s.d_star >= 1.0);
        CHECK(s.d_star <= static_cast<double>(s.D > 0 ? s.D : 1));
    }
}

TEST_CASE("strong regime pins d_star to D") {
    SimParams p = small_run_params();
    p.regime = Regime::Strong;
    p.horizon = 60;
    p.rate_cap = 50.0;
    const Trajectory traj = run_population(p);
    for (const Snapshot& s : traj.snapshots)
        if (s.D > 0) CHECK(s.d_star == doctest::Approx(static_cast<double>(s.D)));
}

TEST_CASE("new-type split follows the conditional probability") {
    SimParams p = small_run_params();
    p.horizon = 400;
    p.entry_rate = 0.5;
    const Trajectory traj = run_population(p);
    REQUIRE(traj.events.size() >= 10000);
    // Replay per organization; events appear in draw order.
    std::vector<std::uint64_t> k(traj.orgs.size(), 0), d(traj.orgs.size(), 0);
    double expected = 0.0, variance = 0.0, observed = 0.0;
    for (const EventRecord& e : traj.events) {
        if (k[e.org_id] > 0) {
            const double dd = static_cast<double>(d[e.org_id]);
            const double kk = static_cast<double>(k[e.org_id]);
            const double pn = p.nu * dd / (p.nu * dd + p.rho * kk);
            expected += pn;
            variance += pn * (1.0 - pn);
            if (e.is_new_type) observed += 1.0;
        }
        ++k[e.org_id];
        if (e.is_new_type) ++d[e.org_id];
    }
    CHECK(std::abs(observed - expected) <= 3.0 * std::sqrt(variance));
}

TEST_CASE("same seed reproduces the trajectory byte for byte") {
    const SimParams p = small_run_params();
    const Trajectory a = run_population(p);
    const Trajectory b = run_population(p);
    std::ostringstream ea, eb, sa, sb;
    write_events_csv(a, ea);
    write_events_csv(b, eb);
    write_snapshots_csv(a, sa);
    write_snapshots_csv(b, sb);
    CHECK(ea.str() == eb.str());
    CHECK(sa.str() == sb.str());

    SimParams q = p;
    q.seed = p.seed + 1;
    const Trajectory c = run_population(q);
    std::ostringstream ec;
    write_events_csv(c, ec);
    CHECK(ea.str() != ec.str());
}

TEST_CASE("entry flow controls the organization count") {
    SimParams p = small_run_params();
    p.entry_rate = 0.0;
    CHECK(run_population(p).orgs.size() == 1);

    p.entry_rate = 1.0;
    p.horizon = 100;
    p.seed = 3;
    const std::size_t n = run_population(p).orgs.size();
    // 1 + Poisson(100): three sigma around the mean
    CHECK(n >= 71);
    CHECK(n <= 131);
}

TEST_CASE("rate cap bounds the per-step event mean") {
    SimParams p;
    p.nu = 2.0;
    p.rho = 4.0;
    p.lambda = 1.0;
    p.regime = Regime::Strong; // d_star = D, rates grow quickly
    p.rate_cap = 2.0;
    p.horizon = 200;
    p.seed = 11;
    const Trajectory traj = run_population(p);
    const double mean =
        static_cast<double>(traj.events.size()) / static_cast<double>(p.horizon);
    CHECK(mean > 1.5);
    CHECK(mean < 2.5);
}

TEST_CASE("strong regime grows superlinearly before the cap") {
    SimParams p;
    p.nu = 0.5;
    p.rho = 0.5;
    p.lambda = 2.0;
    p.regime = Regime::Strong;
    p.rate_cap = 10000.0; // effectively uncapped in the fit window
    p.horizon = 30;
    p.seed = 5;
    const Trajectory traj = run_population(p);
    std::vector<std::pair<double, double>> pts;
    for (const laws::KernelObs& o : laws::kernel_obs_from(traj))
        if (o.k_before >= 2.0 && o.n_events >= 1.0 && o.n_events < 0.5 * p.rate_cap)
            pts.emplace_back(std::log(o.k_before), std::log(o.n_events));
    REQUIRE(pts.size() >= 8);
    CHECK(ols(pts).slope > 1.0);
}

TEST_CASE("weak regime with neutral fitness has a near-linear kernel") {
    // rates stay two orders of magnitude under the cap so the kernel is
    // never censored from above
    SimParams p;
    p.nu = 0.001;
    p.rho = 0.02;
    p.lambda = 1.0;
    p.depth_mean = 0.8; // d / (1 - s) = 1: d_star stays at its floor
    p.scope_mean = 0.2;
    p.entry_rate = 1.0;
    p.rate_cap = 50.0;
    p.horizon = 300;
    p.seed = 2;
    const Trajectory traj = run_population(p);
    const laws::KernelFit fit = laws::estimate_attachment_kernel(traj);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.1));
}

} // TEST_SUITE
