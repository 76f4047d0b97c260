#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "innodyn/engine.hpp"
#include "innodyn/heaps.hpp"
#include "innodyn/io.hpp"
#include "innodyn/kernel.hpp"
#include "innodyn/population.hpp"
#include "innodyn/powerlaw.hpp"
#include "innodyn/productspace.hpp"
#include "innodyn/version.hpp"

namespace py = pybind11;
using namespace innodyn;

namespace {

void def_engine(py::module_& m) {
    py::enum_<Regime>(m, "Regime")
        .value("Strong", Regime::Strong)
        .value("Weak", Regime::Weak);

    py::class_<SimParams>(m, "SimParams")
        .def(py::init<>())
        .def_readwrite("nu", &SimParams::nu)
        .def_readwrite("rho", &SimParams::rho)
        .def_readwrite("lambda_", &SimParams::lambda)
        .def_readwrite("entry_rate", &SimParams::entry_rate)
        .def_readwrite("depth_mean", &SimParams::depth_mean)
        .def_readwrite("scope_mean", &SimParams::scope_mean)
        .def_readwrite("depth_jitter", &SimParams::depth_jitter)
        .def_readwrite("scope_jitter", &SimParams::scope_jitter)
        .def_readwrite("regime", &SimParams::regime)
        .def_readwrite("rate_cap", &SimParams::rate_cap)
        .def_readwrite("horizon", &SimParams::horizon)
        .def_readwrite("dt", &SimParams::dt)
        .def_readwrite("seed", &SimParams::seed)
        .def("validate", &SimParams::validate);

    py::class_<EventRecord>(m, "EventRecord")
        .def_readonly("org_id", &EventRecord::org_id)
        .def_readonly("time", &EventRecord::time)
        .def_readonly("product_code", &EventRecord::product_code)
        .def_readonly("is_new_type", &EventRecord::is_new_type);

    py::class_<Snapshot>(m, "Snapshot")
        .def_readonly("org_id", &Snapshot::org_id)
        .def_readonly("time", &Snapshot::time)
        .def_readonly("k", &Snapshot::k)
        .def_readonly("D", &Snapshot::D)
        .def_readonly("d_star", &Snapshot::d_star);

    py::class_<OrgState>(m, "OrgState")
        .def_readonly("org_id", &OrgState::org_id)
        .def_readonly("birth_time", &OrgState::birth_time)
        .def_readonly("k", &OrgState::k)
        .def_readonly("D", &OrgState::D)
        .def_readonly("d_star", &OrgState::d_star)
        .def_readonly("eta", &OrgState::eta)
        .def("improvements", &OrgState::improvements);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("params", &Trajectory::params)
        .def_readonly("events", &Trajectory::events)
        .def_readonly("snapshots", &Trajectory::snapshots)
        .def_readonly("orgs", &Trajectory::orgs)
        .def_readonly("n_codes", &Trajectory::n_codes)
        .def("events_csv", [](const Trajectory& t) {
            std::ostringstream os;
            write_events_csv(t, os);
            return os.str();
        })
        .def("snapshots_csv", [](const Trajectory& t) {
            std::ostringstream os;
            write_snapshots_csv(t, os);
            return os.str();
        });

    m.def("run_population", &run_population, py::arg("params"),
          "Run a full population simulation; identical (params, seed) give "
          "identical trajectories.");
    m.def("recombination_count", &recombination_count, py::arg("d_star"), py::arg("lambda_"));
    m.def("fitness", &fitness, py::arg("depth_mean"), py::arg("scope_mean"));
    m.def("update_search_space", &update_search_space, py::arg("d_star"), py::arg("depth"),
          py::arg("scope"), py::arg("D"));
    m.def("heaps_pairs", &heaps_pairs, py::arg("trajectory"), py::arg("org_id"));
    m.def("kernel_observations", &kernel_observations, py::arg("trajectory"));
    m.def("final_k_values", &final_k_values, py::arg("trajectory"), py::arg("min_k") = 1);
}

void def_laws(py::module_& m) {
    py::class_<laws::HeapsFit>(m, "HeapsFit")
        .def_readonly("exponent", &laws::HeapsFit::exponent)
        .def_readonly("prefactor", &laws::HeapsFit::prefactor)
        .def_readonly("stderr", &laws::HeapsFit::std_err)
        .def_readonly("r_squared", &laws::HeapsFit::r_squared)
        .def_readonly("n_points", &laws::HeapsFit::n_points);

    py::class_<laws::OdeSolution>(m, "OdeSolution")
        .def_readonly("samples", &laws::OdeSolution::samples)
        .def_readonly("nu", &laws::OdeSolution::nu)
        .def_readonly("rho", &laws::OdeSolution::rho);

    py::class_<laws::KernelBin>(m, "KernelBin")
        .def_readonly("k_mid", &laws::KernelBin::k_mid)
        .def_readonly("mean_rate", &laws::KernelBin::mean_rate)
        .def_readonly("n_orgs", &laws::KernelBin::n_orgs);

    py::class_<laws::KernelFit>(m, "KernelFit")
        .def_readonly("exponent", &laws::KernelFit::exponent)
        .def_readonly("stderr", &laws::KernelFit::std_err)
        .def_readonly("bins", &laws::KernelFit::bins);

    py::class_<laws::PowerLawFit>(m, "PowerLawFit")
        .def_readonly("alpha", &laws::PowerLawFit::alpha)
        .def_readonly("x_min", &laws::PowerLawFit::x_min)
        .def_readonly("ks_stat", &laws::PowerLawFit::ks_stat)
        .def_readonly("p_value", &laws::PowerLawFit::p_value)
        .def_readonly("n_tail", &laws::PowerLawFit::n_tail);

    py::class_<laws::LognormalParams>(m, "LognormalParams")
        .def_readonly("mu", &laws::LognormalParams::mu)
        .def_readonly("sigma", &laws::LognormalParams::sigma);

    py::class_<laws::LRComparison>(m, "LRComparison")
        .def_readonly("r_statistic", &laws::LRComparison::r_statistic)
        .def_readonly("p_value", &laws::LRComparison::p_value)
        .def_readonly("lognormal_params", &laws::LRComparison::lognormal_params);

    py::class_<laws::StationaryDistribution>(m, "StationaryDistribution")
        .def_readonly("p", &laws::StationaryDistribution::p)
        .def_readonly("mu", &laws::StationaryDistribution::mu)
        .def_readonly("lambda_kernel", &laws::StationaryDistribution::lambda_kernel)
        .def_readonly("m", &laws::StationaryDistribution::m);

    m.def("fit_heaps", &laws::fit_heaps, py::arg("kd_pairs"));
    m.def("solve_heaps_ode", &laws::solve_heaps_ode, py::arg("nu"), py::arg("rho"),
          py::arg("k_max"), py::arg("d0") = 0.0, py::arg("n_samples") = 200);
    m.def("implicit_residual", &laws::implicit_residual, py::arg("nu"), py::arg("rho"),
          py::arg("k"), py::arg("d"));
    m.def(
        "estimate_attachment_kernel",
        [](const std::vector<std::tuple<std::uint32_t, double, double>>& obs,
           double bin_ratio) {
            std::vector<laws::KernelObs> v;
            v.reserve(obs.size());
            for (const auto& [org, k, n] : obs) v.push_back({org, k, n});
            return laws::estimate_attachment_kernel(v, bin_ratio);
        },
        py::arg("observations"), py::arg("bin_ratio") = 1.6,
        "observations: list of (org_id, k_before, n_events) tuples");
    m.def("estimate_attachment_kernel_trajectory",
          py::overload_cast<const Trajectory&, double>(&laws::estimate_attachment_kernel),
          py::arg("trajectory"), py::arg("bin_ratio") = 1.6);
    m.def(
        "fit_power_law",
        [](const std::vector<double>& samples, int n_bootstrap, std::uint64_t seed, int jobs,
           std::uint64_t x_min) {
            laws::PowerLawOptions opt;
            opt.n_bootstrap = n_bootstrap;
            opt.seed = seed;
            opt.jobs = jobs;
            opt.x_min_override = x_min;
            return laws::fit_power_law(samples, opt);
        },
        py::arg("samples"), py::arg("n_bootstrap") = 1000, py::arg("seed") = 0,
        py::arg("jobs") = 1, py::arg("x_min") = 0);
    m.def("compare_lognormal", &laws::compare_lognormal, py::arg("samples"), py::arg("fit"));
    m.def("vuong_p_value", &laws::vuong_p_value, py::arg("r"));
    m.def("zeta_hurwitz", &laws::zeta_hurwitz, py::arg("s"), py::arg("a"));
    m.def("stationary_distribution", &laws::stationary_distribution, py::arg("lambda_kernel"),
          py::arg("m"), py::arg("k_max"));
    m.def("bb_closed_form", &laws::bb_closed_form, py::arg("eta"), py::arg("gamma"),
          py::arg("rho_lambda"), py::arg("t"));

    py::enum_<laws::EtaKind>(m, "EtaKind")
        .value("Constant", laws::EtaKind::Constant)
        .value("Uniform", laws::EtaKind::Uniform)
        .value("TwoPoint", laws::EtaKind::TwoPoint);
    py::class_<laws::EtaDistribution>(m, "EtaDistribution")
        .def(py::init([](laws::EtaKind kind, double a, double b, double w) {
                 return laws::EtaDistribution{kind, a, b, w};
             }),
             py::arg("kind"), py::arg("a"), py::arg("b") = 0.0, py::arg("w") = 0.5)
        .def_readwrite("kind", &laws::EtaDistribution::kind)
        .def_readwrite("a", &laws::EtaDistribution::a)
        .def_readwrite("b", &laws::EtaDistribution::b)
        .def_readwrite("w", &laws::EtaDistribution::w)
        .def("variance", &laws::EtaDistribution::variance);
    py::class_<laws::FitnessLimitResult>(m, "FitnessLimitResult")
        .def_readonly("n_orgs", &laws::FitnessLimitResult::n_orgs)
        .def_readonly("t", &laws::FitnessLimitResult::t)
        .def_readonly("mean_log_k", &laws::FitnessLimitResult::mean_log_k)
        .def_readonly("var_log_k", &laws::FitnessLimitResult::var_log_k)
        .def_readonly("jb_stat", &laws::FitnessLimitResult::jb_stat)
        .def_readonly("p_value", &laws::FitnessLimitResult::p_value);
    m.def("heterogeneous_fitness_limit", &laws::heterogeneous_fitness_limit, py::arg("dist"),
          py::arg("n_orgs"), py::arg("t"), py::arg("seed"));
}

void def_productspace(py::module_& m) {
    py::class_<ps::PsEvent>(m, "PsEvent")
        .def(py::init([](std::string org, std::int64_t year, std::string product) {
                 return ps::PsEvent{std::move(org), year, std::move(product)};
             }),
             py::arg("org"), py::arg("year"), py::arg("product"))
        .def_readwrite("org", &ps::PsEvent::org)
        .def_readwrite("year", &ps::PsEvent::year)
        .def_readwrite("product", &ps::PsEvent::product);

    py::class_<ps::CountsTable>(m, "CountsTable")
        .def_readonly("period_length", &ps::CountsTable::period_length)
        .def_readonly("orgs", &ps::CountsTable::orgs)
        .def_readonly("products", &ps::CountsTable::products)
        .def("n_periods", [](const ps::CountsTable& t) { return t.periods.size(); })
        .def("period_start",
             [](const ps::CountsTable& t, std::size_t q) { return t.periods.at(q).start; });

    py::class_<ps::ProximityMatrix>(m, "ProximityMatrix")
        .def_readonly("period_index", &ps::ProximityMatrix::period_index)
        .def_readonly("period_start", &ps::ProximityMatrix::period_start)
        .def_readonly("nodes", &ps::ProximityMatrix::nodes)
        .def_readonly("raw", &ps::ProximityMatrix::raw)
        .def_readonly("retained", &ps::ProximityMatrix::retained)
        .def_readonly("threshold", &ps::ProximityMatrix::threshold);

    py::class_<ps::NetworkStats>(m, "NetworkStats")
        .def_readonly("n_nodes", &ps::NetworkStats::n_nodes)
        .def_readonly("n_edges", &ps::NetworkStats::n_edges)
        .def_readonly("density_pct", &ps::NetworkStats::density_pct)
        .def_readonly("avg_degree", &ps::NetworkStats::avg_degree)
        .def_readonly("std_degree", &ps::NetworkStats::std_degree)
        .def_readonly("transitivity_pct", &ps::NetworkStats::transitivity_pct)
        .def_readonly("avg_path_length", &ps::NetworkStats::avg_path_length)
        .def_readonly("connectivity", &ps::NetworkStats::connectivity)
        .def_readonly("biggest_component", &ps::NetworkStats::biggest_component)
        .def_readonly("small_worldness", &ps::NetworkStats::small_worldness);

    py::class_<ps::PredictionBin>(m, "PredictionBin")
        .def_readonly("omega_lo", &ps::PredictionBin::omega_lo)
        .def_readonly("omega_hi", &ps::PredictionBin::omega_hi)
        .def_readonly("n_explorative", &ps::PredictionBin::n_explorative)
        .def_readonly("hits_explorative", &ps::PredictionBin::hits_explorative)
        .def_readonly("n_exploitative", &ps::PredictionBin::n_exploitative)
        .def_readonly("hits_exploitative", &ps::PredictionBin::hits_exploitative)
        .def_readonly("p_explorative", &ps::PredictionBin::p_explorative)
        .def_readonly("p_exploitative", &ps::PredictionBin::p_exploitative);

    py::class_<ps::DiversificationEval>(m, "DiversificationEval")
        .def_readonly("bins", &ps::DiversificationEval::bins)
        .def_readonly("n_triples", &ps::DiversificationEval::n_triples);

    m.def("build_counts", &ps::build_counts, py::arg("events"), py::arg("period_length") = 10);
    m.def("proximity", &ps::proximity, py::arg("counts"), py::arg("period_index"));
    m.def("density", &ps::density, py::arg("counts"), py::arg("phi"), py::arg("org"),
          py::arg("product"), py::arg("thresholded") = true);
    m.def("network_stats",
          py::overload_cast<const ps::ProximityMatrix&, int, std::uint64_t>(&ps::network_stats),
          py::arg("phi"), py::arg("n_random") = 100, py::arg("seed") = 0);
    m.def("graph_stats",
          py::overload_cast<std::int64_t,
                            const std::vector<std::pair<std::uint32_t, std::uint32_t>>&, int,
                            std::uint64_t>(&ps::network_stats),
          py::arg("n_nodes"), py::arg("edges"), py::arg("n_random") = 100, py::arg("seed") = 0);
    m.def("evaluate_prediction", &ps::evaluate_prediction, py::arg("counts"),
          py::arg("horizon_periods") = 1, py::arg("n_bins") = 10);
    m.def("reachable_within", &ps::reachable_within, py::arg("counts"), py::arg("phi"),
          py::arg("seeds"), py::arg("max_hops") = 2);
    m.def(
        "export_network",
        [](const ps::CountsTable& counts, const std::vector<ps::ProximityMatrix>& mats) {
            std::ostringstream os;
            ps::export_network(counts, mats, os);
            return os.str();
        },
        py::arg("counts"), py::arg("matrices"));
    m.def(
        "read_events_csv",
        [](const std::string& text) {
            std::istringstream is(text);
            return read_events_csv(is);
        },
        py::arg("text"));
}

} // namespace

PYBIND11_MODULE(_innodyn, m) {
    m.doc() = "Recombinant innovation dynamics: simulation engine, statistical-law "
              "estimators, and product-space analysis.";
    m.attr("__version__") = INNODYN_VERSION;
    def_engine(m);
    def_laws(m);
    def_productspace(m);
}
