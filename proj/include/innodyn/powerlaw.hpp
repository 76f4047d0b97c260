#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "innodyn/rng.hpp"

namespace innodyn::laws {

// Hurwitz zeta sum_{n>=0} (a+n)^-s for s > 1, a > 0, by direct summation up
// to a+N >= 16 plus the Euler-Maclaurin tail; relative error < 1e-10.
double zeta_hurwitz(double s, double a);

struct PowerLawFit {
    double alpha = 0.0;
    double x_min = 1.0;
    double ks_stat = 0.0;
    double p_value = 0.0; // NaN when bootstrap is disabled
    std::int64_t n_tail = 0;
};

struct PowerLawOptions {
    int n_bootstrap = 1000; // 0 disables the p-value
    std::uint64_t seed = 0;
    int jobs = 1;
    double alpha_min = 1.000001;
    double alpha_max = 25.0;
    std::uint64_t x_min_override = 0; // 0 = scan all candidates
};

// Discrete maximum-likelihood power-law fit: alpha by golden-section search
// (tolerance 1e-4) on the zeta likelihood, x_min by KS-distance minimization
// over the distinct sample values, p-value by semi-parametric bootstrap.
// Samples must be integers >= 1, n >= 50, not all equal; every candidate
// x_min must keep at least 10 tail points. Bootstrap replicates are seeded
// independently from options.seed, so results do not depend on jobs.
PowerLawFit fit_power_law(const std::vector<double>& samples,
                          const PowerLawOptions& options = {});

struct LognormalParams {
    double mu = 0.0;
    double sigma = 1.0;
};

struct LRComparison {
    double r_statistic = 0.0; // normalized Vuong ratio, power law minus lognormal
    double p_value = 1.0;
    LognormalParams lognormal_params;
};

// Two-sided p-value of the normalized Vuong statistic.
inline double vuong_p_value(double r) {
    return std::erfc(std::abs(r) / std::sqrt(2.0));
}

// Vuong likelihood-ratio comparison of the fitted power law against a
// discrete lognormal (continuous density binned to [x-0.5, x+0.5), truncated
// at x_min) fitted by maximum likelihood on the same tail. Throws on a
// zero-variance tail.
LRComparison compare_lognormal(const std::vector<double>& samples, const PowerLawFit& fit);

// Exact inverse-CDF sampler for the discrete power law x >= x_min.
class ZetaSampler {
  public:
    ZetaSampler(double alpha, std::uint64_t x_min);
    std::uint64_t operator()(Rng& rng) const;
    double alpha() const { return alpha_; }
    std::uint64_t x_min() const { return x_min_; }

  private:
    double alpha_;
    std::uint64_t x_min_;
    double z_; // zeta(alpha, x_min)
    std::vector<double> cdf_;
};

} // namespace innodyn::laws
