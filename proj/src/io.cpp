#include "innodyn/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace innodyn {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim_crlf(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' ||
                          s.back() == '\t'))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

bool parse_int64(const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e && !s.empty();
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e && !s.empty();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

void write_events_csv(const Trajectory& traj, std::ostream& os) {
    os << "org_id,time,product_code,is_new_type\n";
    for (const EventRecord& e : traj.events)
        os << e.org_id << ',' << e.time << ",p" << e.product_code << ','
           << (e.is_new_type ? 1 : 0) << '\n';
}

void write_snapshots_csv(const Trajectory& traj, std::ostream& os) {
    os << "org_id,time,k,D,d_star\n";
    for (const Snapshot& s : traj.snapshots)
        os << s.org_id << ',' << s.time << ',' << s.k << ',' << s.D << ','
           << fmt_double(s.d_star) << '\n';
}

std::vector<ps::PsEvent> read_events_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("events CSV is empty");
    const std::string header = trim_crlf(line);
    bool trajectory_layout = false;
    if (header == "org_id,time,product_code,is_new_type") {
        trajectory_layout = true;
    } else if (header != "org_id,year,product_code") {
        throw std::invalid_argument(
            "events CSV line 1: expected header org_id,year,product_code");
    }
    std::vector<ps::PsEvent> events;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string row = trim_crlf(line);
        if (row.empty()) continue;
        const std::vector<std::string> f = split_csv(row);
        const std::size_t want = trajectory_layout ? 4 : 3;
        if (f.size() != want)
            throw std::invalid_argument("events CSV line " + std::to_string(lineno) +
                                        ": expected " + std::to_string(want) + " fields");
        ps::PsEvent e;
        e.org = f[0];
        if (!parse_int64(f[1], e.year))
            throw std::invalid_argument("events CSV line " + std::to_string(lineno) +
                                        ": non-numeric year '" + f[1] + "'");
        e.product = f[2];
        if (e.org.empty() || e.product.empty())
            throw std::invalid_argument("events CSV line " + std::to_string(lineno) +
                                        ": empty org or product field");
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<double> read_values_csv(std::istream& is) {
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string row = trim_crlf(line);
        if (row.empty()) continue;
        double v = 0.0;
        if (!parse_double(row, v)) {
            if (lineno == 1 && values.empty()) continue; // header line
            throw std::invalid_argument("values CSV line " + std::to_string(lineno) +
                                        ": not a number '" + row + "'");
        }
        values.push_back(v);
    }
    return values;
}

void write_kernel_bins_csv(const laws::KernelFit& fit, std::ostream& os) {
    os << "k_mid,mean_rate,n_orgs\n";
    for (const laws::KernelBin& b : fit.bins)
        os << fmt_double(b.k_mid) << ',' << fmt_double(b.mean_rate) << ',' << b.n_orgs << '\n';
}

namespace {

// JSON has no NaN; emit null and read it back as NaN.
ordered_json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

std::string params_to_json(const SimParams& p) {
    ordered_json j;
    j["nu"] = p.nu;
    j["rho"] = p.rho;
    j["lambda"] = p.lambda;
    j["entry_rate"] = p.entry_rate;
    j["depth_mean"] = p.depth_mean;
    j["scope_mean"] = p.scope_mean;
    j["depth_jitter"] = p.depth_jitter;
    j["scope_jitter"] = p.scope_jitter;
    j["regime"] = p.regime == Regime::Strong ? "strong" : "weak";
    j["rate_cap"] = p.rate_cap;
    j["horizon"] = p.horizon;
    j["dt"] = p.dt;
    j["seed"] = p.seed;
    return j.dump(2);
}

SimParams params_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("params JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("params JSON: document is not an object");
    SimParams p;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "nu") p.nu = val.get<double>();
            else if (key == "rho") p.rho = val.get<double>();
            else if (key == "lambda") p.lambda = val.get<double>();
            else if (key == "entry_rate") p.entry_rate = val.get<double>();
            else if (key == "depth_mean") p.depth_mean = val.get<double>();
            else if (key == "scope_mean") p.scope_mean = val.get<double>();
            else if (key == "depth_jitter") p.depth_jitter = val.get<double>();
            else if (key == "scope_jitter") p.scope_jitter = val.get<double>();
            else if (key == "rate_cap") p.rate_cap = val.get<double>();
            else if (key == "horizon") p.horizon = val.get<std::int64_t>();
            else if (key == "dt") p.dt = val.get<double>();
            else if (key == "seed") p.seed = val.get<std::uint64_t>();
            else if (key == "regime") {
                const std::string r = val.get<std::string>();
                if (r == "strong") p.regime = Regime::Strong;
                else if (r == "weak") p.regime = Regime::Weak;
                else throw std::invalid_argument("params JSON: regime must be 'strong' or 'weak'");
            } else {
                throw std::invalid_argument("params JSON: unknown key '" + key + "'");
            }
        } catch (const ordered_json::exception& e) {
            throw std::invalid_argument("params JSON: bad value for '" + key + "': " + e.what());
        }
    }
    return p;
}

std::string heaps_fit_to_json(const laws::HeapsFit& fit) {
    ordered_json j;
    j["exponent"] = fit.exponent;
    j["prefactor"] = fit.prefactor;
    j["stderr"] = fit.std_err;
    j["r_squared"] = fit.r_squared;
    j["n_points"] = fit.n_points;
    return j.dump(2);
}

std::string kernel_fit_to_json(const laws::KernelFit& fit) {
    ordered_json j;
    j["exponent"] = fit.exponent;
    j["stderr"] = fit.std_err;
    j["bins"] = ordered_json::array();
    for (const laws::KernelBin& b : fit.bins) {
        ordered_json jb;
        jb["k_mid"] = b.k_mid;
        jb["mean_rate"] = b.mean_rate;
        jb["n_orgs"] = b.n_orgs;
        j["bins"].push_back(std::move(jb));
    }
    return j.dump(2);
}

std::string power_law_fit_to_json(const laws::PowerLawFit& fit) {
    ordered_json j;
    j["alpha"] = fit.alpha;
    j["x_min"] = static_cast<std::int64_t>(fit.x_min);
    j["ks_stat"] = fit.ks_stat;
    j["p_value"] = num_or_null(fit.p_value);
    j["n_tail"] = fit.n_tail;
    return j.dump(2);
}

std::string lr_comparison_to_json(const laws::LRComparison& cmp) {
    ordered_json j;
    j["r_statistic"] = cmp.r_statistic;
    j["p_value"] = cmp.p_value;
    ordered_json lp;
    lp["mu"] = cmp.lognormal_params.mu;
    lp["sigma"] = cmp.lognormal_params.sigma;
    j["lognormal_params"] = std::move(lp);
    return j.dump(2);
}

std::string network_stats_to_json(const ps::NetworkStats& st) {
    ordered_json j;
    j["n_nodes"] = st.n_nodes;
    j["n_edges"] = st.n_edges;
    j["density_pct"] = st.density_pct;
    j["avg_degree"] = st.avg_degree;
    j["std_degree"] = st.std_degree;
    j["transitivity_pct"] = st.transitivity_pct;
    j["avg_path_length"] = st.avg_path_length;
    j["connectivity"] = st.connectivity;
    j["biggest_component"] = st.biggest_component;
    j["small_worldness"] = num_or_null(st.small_worldness);
    return j.dump(2);
}

std::string prediction_eval_to_json(const ps::DiversificationEval& ev) {
    ordered_json j;
    j["n_triples"] = ev.n_triples;
    j["bins"] = ordered_json::array();
    for (const ps::PredictionBin& b : ev.bins) {
        ordered_json jb;
        jb["omega_lo"] = b.omega_lo;
        jb["omega_hi"] = b.omega_hi;
        jb["n_explorative"] = b.n_explorative;
        jb["hits_explorative"] = b.hits_explorative;
        jb["n_exploitative"] = b.n_exploitative;
        jb["hits_exploitative"] = b.hits_exploitative;
        jb["p_explorative"] = num_or_null(b.p_explorative);
        jb["p_exploitative"] = num_or_null(b.p_exploitative);
        j["bins"].push_back(std::move(jb));
    }
    return j.dump(2);
}

} // namespace innodyn
