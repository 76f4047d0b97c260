#include "innodyn/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "innodyn/linfit.hpp"

namespace innodyn::laws {

std::vector<KernelObs> kernel_obs_from(const Trajectory& traj) {
    std::vector<KernelObs> out;
    std::vector<Snapshot> last(traj.orgs.size());
    std::vector<bool> seen(traj.orgs.size(), false);
    for (const Snapshot& s : traj.snapshots) {
        if (seen[s.org_id]) {
            const Snapshot& prev = last[s.org_id];
            out.push_back({s.org_id, static_cast<double>(prev.k),
                           static_cast<double>(s.k - prev.k)});
        }
        last[s.org_id] = s;
        seen[s.org_id] = true;
    }
    return out;
}

KernelFit estimate_attachment_kernel(const std::vector<KernelObs>& obs, double bin_ratio) {
    if (!(bin_ratio > 1.0)) throw std::invalid_argument("bin_ratio must be > 1");
    double total_events = 0.0;
    std::set<std::uint32_t> orgs;
    for (const KernelObs& o : obs) {
        total_events += o.n_events;
        orgs.insert(o.org_id);
    }
    if (total_events < 100.0 || orgs.size() < 10)
        throw std::invalid_argument(
            "estimate_attachment_kernel needs >= 100 events across >= 10 organizations");

    struct Acc {
        double events = 0.0;
        std::int64_t count = 0;
        std::set<std::uint32_t> orgs;
    };
    const double log_ratio = std::log(bin_ratio);
    std::map<int, Acc> byBin;
    for (const KernelObs& o : obs) {
        if (o.k_before < 1.0) continue;
        const int bin = static_cast<int>(std::floor(std::log(o.k_before) / log_ratio + 1e-12));
        Acc& a = byBin[bin];
        a.events += o.n_events;
        a.count += 1;
        a.orgs.insert(o.org_id);
    }

    KernelFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [bin, acc] : byBin) {
        const double lo = std::pow(bin_ratio, bin);
        const double k_mid = lo * std::sqrt(bin_ratio);
        const double rate = acc.events / static_cast<double>(acc.count);
        fit.bins.push_back({k_mid, rate, static_cast<std::int64_t>(acc.orgs.size())});
        if (rate > 0.0) pts.emplace_back(std::log(k_mid), std::log(rate));
    }
    if (pts.size() < 3)
        throw std::invalid_argument("estimate_attachment_kernel: fewer than 3 usable bins");
    LinFit f = ols(pts);
    fit.exponent = f.slope;
    fit.std_err = f.slope_se;
    return fit;
}

KernelFit estimate_attachment_kernel(const Trajectory& traj, double bin_ratio) {
    return estimate_attachment_kernel(kernel_obs_from(traj), bin_ratio);
}

} // namespace innodyn::laws
