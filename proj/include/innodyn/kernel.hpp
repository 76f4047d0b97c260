#pragma once

#include <cstdint>
#include <vector>

#include "innodyn/engine.hpp"

namespace innodyn::laws {

struct KernelBin {
    double k_mid = 0.0;     // geometric midpoint of the bin
    double mean_rate = 0.0; // mean events per step over observations in the bin
    std::int64_t n_orgs = 0; // distinct organizations contributing
};

struct KernelFit {
    double exponent = 0.0;
    double std_err = 0.0;
    std::vector<KernelBin> bins;
};

// One organization-step observation: k at the start of the step and the
// events realized during it.
struct KernelObs {
    std::uint32_t org_id = 0;
    double k_before = 0.0;
    double n_events = 0.0;
};

// Pools (k before step, events during step) observations, bins them
// logarithmically in k (k >= 1; bin edges grow by bin_ratio), and fits
// ln(mean_rate) on ln(k_mid) by OLS. Bins without events are excluded from
// the fit (their log rate is undefined) but still reported.
// Requires >= 100 total events across >= 10 organizations.
KernelFit estimate_attachment_kernel(const std::vector<KernelObs>& obs,
                                     double bin_ratio = 1.6);

// Convenience overload deriving observations from trajectory snapshots.
KernelFit estimate_attachment_kernel(const Trajectory& traj, double bin_ratio = 1.6);

// Per-org-step observations from consecutive snapshots of a trajectory.
std::vector<KernelObs> kernel_obs_from(const Trajectory& traj);

} // namespace innodyn::laws
