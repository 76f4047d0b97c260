#include <cmath>
#include <vector>

#include "doctest.h"

#include "innodyn/kernel.hpp"
#include "testutil.hpp"

using namespace innodyn;

namespace {

// One observation per log-spaced k so bin means sit exactly on the power law.
std::vector<laws::KernelObs> noiseless_obs(double gamma, double c) {
    std::vector<laws::KernelObs> obs;
    for (int j = 0; j <= 12; ++j) {
        const double k = std::pow(2.0, j);
        obs.push_back({static_cast<std::uint32_t>(j), k, c * std::pow(k, gamma)});
    }
    return obs;
}

} // namespace

TEST_SUITE("laws_kernel") {

TEST_CASE("noiseless inputs recover the exponent exactly") {
    for (double gamma : {1.0, 0.0, 0.7}) {
        const double c = gamma == 1.0 ? 0.05 : (gamma == 0.0 ? 10.0 : 0.2); // total >= 100 events
        const laws::KernelFit fit = laws::estimate_attachment_kernel(noiseless_obs(gamma, c), 2.0);
        CHECK(std::abs(fit.exponent - gamma) < 1e-10);
    }
}

TEST_CASE("bins are ordered and populated") {
    const laws::KernelFit fit = laws::estimate_attachment_kernel(noiseless_obs(1.0, 0.05), 2.0);
    REQUIRE(fit.bins.size() >= 5);
    for (std::size_t i = 0; i < fit.bins.size(); ++i) {
        CHECK(fit.bins[i].n_orgs >= 1);
        if (i > 0) CHECK(fit.bins[i].k_mid > fit.bins[i - 1].k_mid);
    }
}

TEST_CASE("Yule process has a linear kernel") {
    const auto obs = testutil::yule_process(200, 200, 0.02, 41);
    const laws::KernelFit fit = laws::estimate_attachment_kernel(obs);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fit.std_err < 0.1);
}

TEST_CASE("constant-rate process has a flat kernel") {
    const auto obs = testutil::flat_process(200, 200, 0.5, 17);
    const laws::KernelFit fit = laws::estimate_attachment_kernel(obs);
    CHECK(std::abs(fit.exponent) < 0.1);
}

TEST_CASE("insufficient data is rejected") {
    // plenty of events but only 2 organizations
    std::vector<laws::KernelObs> few_orgs;
    for (int t = 0; t < 100; ++t)
        few_orgs.push_back({static_cast<std::uint32_t>(t % 2), static_cast<double>(t + 1), 2.0});
    CHECK_THROWS_AS(laws::estimate_attachment_kernel(few_orgs), std::invalid_argument);

    // many organizations but too few events
    std::vector<laws::KernelObs> few_events;
    for (int o = 0; o < 20; ++o)
        few_events.push_back({static_cast<std::uint32_t>(o), static_cast<double>(o + 1), 1.0});
    CHECK_THROWS_AS(laws::estimate_attachment_kernel(few_events), std::invalid_argument);
}

TEST_CASE("trajectory overload matches the explicit observations") {
    SimParams p;
    p.nu = 0.05;
    p.rho = 0.2;
    p.lambda = 1.0;
    p.entry_rate = 1.0;
    p.horizon = 200;
    p.seed = 9;
    const Trajectory traj = run_population(p);
    const laws::KernelFit a = laws::estimate_attachment_kernel(traj);
    const laws::KernelFit b = laws::estimate_attachment_kernel(laws::kernel_obs_from(traj));
    CHECK(a.exponent == doctest::Approx(b.exponent));
    CHECK(a.bins.size() == b.bins.size());
}

} // TEST_SUITE
