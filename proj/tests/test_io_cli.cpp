#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "innodyn/commands.hpp"
#include "innodyn/heaps.hpp"
#include "innodyn/io.hpp"
#include "innodyn/kernel.hpp"
#include "innodyn/powerlaw.hpp"

using namespace innodyn;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("fmt_double emits minimal round-tripping strings") {
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(5.0) == "5");
    CHECK(fmt_double(0.4) == "0.4");
    CHECK(fmt_double(-2.5) == "-2.5");
    CHECK(fmt_double(0.0) == "0");

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = unit(rng) * std::pow(10.0, expo(rng));
        const std::string s = fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(std::strtod(fmt_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("trajectory CSV layouts") {
    Trajectory traj;
    traj.events.push_back({3, 7, 12, true});
    traj.events.push_back({0, 8, 1, false});
    traj.snapshots.push_back({3, 7, 5, 4, 2.5});

    std::ostringstream ev;
    write_events_csv(traj, ev);
    CHECK(ev.str() == "org_id,time,product_code,is_new_type\n3,7,p12,1\n0,8,p1,0\n");

    std::ostringstream sn;
    write_snapshots_csv(traj, sn);
    CHECK(sn.str() == "org_id,time,k,D,d_star\n3,7,5,4,2.5\n");

    // the events export parses back through the panel reader
    std::istringstream is(ev.str());
    const std::vector<ps::PsEvent> events = read_events_csv(is);
    REQUIRE(events.size() == 2);
    CHECK(events[0].org == "3");
    CHECK(events[0].year == 7);
    CHECK(events[0].product == "p12");
    CHECK(events[1].product == "p1");
}

TEST_CASE("read_events_csv accepts the panel layout with CRLF and blanks") {
    std::istringstream is("org_id,year,product_code\r\nacme,1995,widgets\r\n\r\nbeta,2001,gears\r\n");
    const std::vector<ps::PsEvent> events = read_events_csv(is);
    REQUIRE(events.size() == 2);
    CHECK(events[0].org == "acme");
    CHECK(events[0].year == 1995);
    CHECK(events[0].product == "widgets");
    CHECK(events[1].year == 2001);
}

TEST_CASE("read_events_csv errors name the line") {
    std::istringstream empty("");
    CHECK_THROWS_WITH_AS(read_events_csv(empty), "events CSV is empty", std::invalid_argument);

    std::istringstream bad_header("org,year\na,1,b\n");
    CHECK_THROWS_WITH_AS(read_events_csv(bad_header),
                         "events CSV line 1: expected header org_id,year,product_code",
                         std::invalid_argument);

    std::istringstream short_row("org_id,year,product_code\na,1,b\na,1\n");
    CHECK_THROWS_WITH_AS(read_events_csv(short_row),
                         "events CSV line 3: expected 3 fields", std::invalid_argument);

    std::istringstream bad_year("org_id,year,product_code\na,199x,b\n");
    CHECK_THROWS_WITH_AS(read_events_csv(bad_year),
                         "events CSV line 2: non-numeric year '199x'", std::invalid_argument);

    std::istringstream empty_field("org_id,year,product_code\n,1995,b\n");
    CHECK_THROWS_WITH_AS(read_events_csv(empty_field),
                         "events CSV line 2: empty org or product field", std::invalid_argument);
}

TEST_CASE("read_values_csv skips one optional header") {
    std::istringstream with_header("k\n1\n2\n3.5\n");
    CHECK(read_values_csv(with_header) == std::vector<double>{1.0, 2.0, 3.5});

    std::istringstream bare("4\n5\n");
    CHECK(read_values_csv(bare) == std::vector<double>{4.0, 5.0});

    std::istringstream bad("k\n1\nx\n");
    CHECK_THROWS_WITH_AS(read_values_csv(bad), "values CSV line 3: not a number 'x'",
                         std::invalid_argument);

    // a second non-numeric line is not a header
    std::istringstream two_headers("k\nv\n1\n");
    CHECK_THROWS_AS(read_values_csv(two_headers), std::invalid_argument);
}

TEST_CASE("kernel bins CSV") {
    laws::KernelFit fit;
    fit.bins.push_back({1.5, 0.25, 10});
    fit.bins.push_back({3.0, 0.5, 7});
    std::ostringstream os;
    write_kernel_bins_csv(fit, os);
    CHECK(os.str() == "k_mid,mean_rate,n_orgs\n1.5,0.25,10\n3,0.5,7\n");
}

TEST_CASE("simulation parameters survive a JSON round-trip") {
    SimParams p;
    p.nu = 0.004;
    p.rho = 0.01;
    p.lambda = 1.5;
    p.entry_rate = 0.25;
    p.depth_mean = 0.85;
    p.scope_mean = 0.15;
    p.depth_jitter = 0.05;
    p.scope_jitter = 0.025;
    p.regime = Regime::Strong;
    p.rate_cap = 1234.5;
    p.horizon = 777;
    p.dt = 0.5;
    p.seed = 424242;

    const SimParams q = params_from_json(params_to_json(p));
    CHECK(q.nu == p.nu);
    CHECK(q.rho == p.rho);
    CHECK(q.lambda == p.lambda);
    CHECK(q.entry_rate == p.entry_rate);
    CHECK(q.depth_mean == p.depth_mean);
    CHECK(q.scope_mean == p.scope_mean);
    CHECK(q.depth_jitter == p.depth_jitter);
    CHECK(q.scope_jitter == p.scope_jitter);
    CHECK(q.regime == Regime::Strong);
    CHECK(q.rate_cap == p.rate_cap);
    CHECK(q.horizon == p.horizon);
    CHECK(q.dt == p.dt);
    CHECK(q.seed == p.seed);

    CHECK(contains(params_to_json(p), "\"regime\": \"strong\""));
    p.regime = Regime::Weak;
    CHECK(contains(params_to_json(p), "\"regime\": \"weak\""));
}

TEST_CASE("params JSON rejects junk and names the offender") {
    CHECK_THROWS_WITH_AS(params_from_json("{\"frobnicate\": 1}"),
                         "params JSON: unknown key 'frobnicate'", std::invalid_argument);
    CHECK_THROWS_AS(params_from_json("{\"regime\": \"sideways\"}"), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json("[1,2]"), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json("{\"nu\": \"fast\"}"), std::invalid_argument);
    try {
        params_from_json("{\"nu\": \"fast\"}");
    } catch (const std::invalid_argument& e) {
        CHECK(contains(e.what(), "'nu'"));
    }
    // partial documents keep defaults for the rest
    const SimParams q = params_from_json("{\"nu\": 0.25}");
    CHECK(q.nu == 0.25);
    CHECK(q.rho == SimParams{}.rho);
}

TEST_CASE("result JSON spells stderr out") {
    laws::HeapsFit hf;
    hf.exponent = 0.5;
    hf.std_err = 0.01;
    CHECK(contains(heaps_fit_to_json(hf), "\"stderr\""));
    CHECK(!contains(heaps_fit_to_json(hf), "std_err"));

    laws::KernelFit kf;
    kf.exponent = 1.0;
    kf.std_err = 0.05;
    kf.bins.push_back({2.0, 0.1, 3});
    CHECK(contains(kernel_fit_to_json(kf), "\"stderr\""));

    laws::PowerLawFit pf;
    pf.alpha = 2.0;
    pf.x_min = 4;
    pf.p_value = std::nan("");
    CHECK(contains(power_law_fit_to_json(pf), "\"p_value\": null"));
    pf.p_value = 0.5;
    CHECK(contains(power_law_fit_to_json(pf), "\"p_value\": 0.5"));
}

} // TEST_SUITE

TEST_SUITE("cli_config") {

TEST_CASE("fit config from bare JSON") {
    const cli::FitConfig cfg = cli::fit_config_from_json(
        "{\"fitter\":\"dist\",\"input\":\"k.csv\",\"n_bootstrap\":250,\"jobs\":4,"
        "\"x_min\":3,\"seed\":9,\"output\":\"out\"}");
    CHECK(cfg.fitter == "dist");
    CHECK(cfg.input == "k.csv");
    CHECK(cfg.n_bootstrap == 250);
    CHECK(cfg.jobs == 4);
    CHECK(cfg.x_min == 3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.output == "out");
    CHECK(cfg.bin_ratio == 1.6); // untouched default

    CHECK_THROWS_WITH_AS(cli::fit_config_from_json("{\"fadder\":\"x\"}"),
                         "config JSON: unknown key 'fadder'", std::invalid_argument);
    CHECK_THROWS_AS(cli::fit_config_from_json("{\"jobs\":\"many\"}"), std::invalid_argument);
}

TEST_CASE("manifest envelopes unwrap when the command matches") {
    const std::string manifest =
        "{\"tool\":\"innodyn\",\"version\":\"0.0.0\",\"command\":\"fit\",\"seed\":7,"
        "\"config\":{\"fitter\":\"heaps\",\"org\":\"12\"}}";
    const cli::FitConfig cfg = cli::fit_config_from_json(manifest);
    CHECK(cfg.fitter == "heaps");
    CHECK(cfg.org == "12");

    const std::string wrong =
        "{\"tool\":\"innodyn\",\"version\":\"0.0.0\",\"command\":\"simulate\",\"seed\":7,"
        "\"config\":{}}";
    CHECK_THROWS_WITH_AS(cli::fit_config_from_json(wrong),
                         "config JSON: manifest is for command 'simulate', not 'fit'",
                         std::invalid_argument);
    CHECK_THROWS_AS(
        cli::fit_config_from_json("{\"tool\":\"innodyn\",\"command\":\"fit\",\"config\":3}"),
        std::invalid_argument);
}

TEST_CASE("simulate config delegates parameter keys") {
    const cli::SimulateConfig cfg = cli::simulate_config_from_json(
        "{\"nu\":0.25,\"regime\":\"strong\",\"horizon\":50,\"output\":\"bundle\"}");
    CHECK(cfg.params.nu == 0.25);
    CHECK(cfg.params.regime == Regime::Strong);
    CHECK(cfg.params.horizon == 50);
    CHECK(cfg.output == "bundle");
    CHECK_THROWS_WITH_AS(cli::simulate_config_from_json("{\"nuu\":0.25}"),
                         "params JSON: unknown key 'nuu'", std::invalid_argument);
}

TEST_CASE("productspace and oracle configs") {
    const cli::ProductSpaceConfig ps_cfg = cli::productspace_config_from_json(
        "{\"input\":\"e.csv\",\"period_length\":5,\"predict\":true,\"n_bins\":4,"
        "\"horizon_periods\":2,\"n_random\":10,\"seed\":3,\"output\":\"o\"}");
    CHECK(ps_cfg.input == "e.csv");
    CHECK(ps_cfg.period_length == 5);
    CHECK(ps_cfg.predict);
    CHECK(ps_cfg.n_bins == 4);
    CHECK(ps_cfg.horizon_periods == 2);
    CHECK(ps_cfg.n_random == 10);
    CHECK(ps_cfg.seed == 3);
    CHECK_THROWS_AS(cli::productspace_config_from_json("{\"bins\":4}"), std::invalid_argument);

    const cli::OracleConfig oc =
        cli::oracle_config_from_json("{\"nu\":0.5,\"rho\":1.5,\"kernel_lambda\":0.7,"
                                     "\"kernel_m\":0.01,\"k_max\":5000}");
    CHECK(oc.nu == 0.5);
    CHECK(oc.rho == 1.5);
    CHECK(oc.kernel_lambda == 0.7);
    CHECK(oc.kernel_m == 0.01);
    CHECK(oc.k_max == 5000);
    CHECK_THROWS_AS(cli::oracle_config_from_json("{\"kmax\":1}"), std::invalid_argument);
}

} // TEST_SUITE
