#include "innodyn/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace innodyn::laws {

StationaryDistribution stationary_distribution(double lambda_kernel, double m,
                                               std::int64_t k_max) {
    if (!(lambda_kernel > 0.0 && lambda_kernel <= 1.0))
        throw std::invalid_argument("lambda_kernel must be in (0, 1]");
    if (!(m > 0.0)) throw std::invalid_argument("m must be > 0");
    if (k_max < 100) throw std::invalid_argument("k_max must be >= 100");

    const std::size_t n = static_cast<std::size_t>(k_max);
    std::vector<double> klam(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        klam[k] = std::pow(static_cast<double>(k), lambda_kernel);

    std::vector<double> p(n + 1, 0.0);
    // One evaluation of the map mu -> E[k^lambda] under P(.; mu).
    // Recursion scale cancels under normalization, so seed P_1 = 1.
    const auto mean_klam = [&](double mu) {
        p[1] = 1.0;
        double total = p[1];
        for (std::size_t k = 2; k <= n; ++k) {
            p[k] = p[k - 1] * klam[k - 1] / (mu * m + klam[k]);
            total += p[k];
        }
        double out = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            p[k] /= total;
            out += klam[k] * p[k];
        }
        return out;
    };

    // E[k^lambda] is strictly decreasing in mu (larger mu thins the tail),
    // so the self-consistent point is the unique root of g(mu) - mu and a
    // bracketed fixed-point search cannot oscillate the way plain damped
    // iteration does for small m.
    double lo = 0.0;
    double hi = 1.0;
    int iter = 0;
    while (mean_klam(hi) > hi) {
        hi *= 2.0;
        if (++iter >= 10000)
            throw std::runtime_error("stationary_distribution: fixed point did not converge");
    }
    double mu = hi;
    bool converged = false;
    for (; iter < 10000; ++iter) {
        mu = 0.5 * (lo + hi);
        const double g = mean_klam(mu);
        if (std::abs(g - mu) <= 1e-8 * std::max(1.0, std::abs(mu))) {
            converged = true;
            break;
        }
        (g > mu ? lo : hi) = mu;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break; // interval exhausted
    }
    if (!converged)
        throw std::runtime_error("stationary_distribution: fixed point did not converge");
    mean_klam(mu); // leave p at the converged mu

    StationaryDistribution out;
    out.p = std::move(p);
    out.mu = mu;
    out.lambda_kernel = lambda_kernel;
    out.m = m;
    return out;
}

double bb_closed_form(double eta, double gamma, double rho_lambda, double t) {
    if (!(eta > 0.0)) throw std::domain_error("bb_closed_form requires eta > 0");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::domain_error("bb_closed_form requires gamma in [0, 1)");
    if (!(rho_lambda > 0.0)) throw std::domain_error("bb_closed_form requires rho_lambda > 0");
    if (!(t >= 0.0)) throw std::domain_error("bb_closed_form requires t >= 0");
    const double g = 1.0 - gamma;
    return std::pow(rho_lambda, 1.0 / g) * std::pow(eta / g, -1.0 / g) *
           std::exp(eta * t / g);
}

double EtaDistribution::draw(Rng& rng) const {
    switch (kind) {
        case EtaKind::Constant:
            return a;
        case EtaKind::Uniform: {
            std::uniform_real_distribution<double> u(a, b);
            return u(rng);
        }
        case EtaKind::TwoPoint: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return u(rng) < w ? a : b;
        }
    }
    return a;
}

double EtaDistribution::variance() const {
    switch (kind) {
        case EtaKind::Constant:
            return 0.0;
        case EtaKind::Uniform:
            return (b - a) * (b - a) / 12.0;
        case EtaKind::TwoPoint:
            return w * (1.0 - w) * (a - b) * (a - b);
    }
    return 0.0;
}

FitnessLimitResult heterogeneous_fitness_limit(const EtaDistribution& dist,
                                               std::int64_t n_orgs, std::int64_t t,
                                               std::uint64_t seed) {
    if (n_orgs < 2) throw std::invalid_argument("n_orgs must be >= 2");
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    Rng rng = make_rng(seed, "fitness-limit");
    std::vector<double> logk(static_cast<std::size_t>(n_orgs), 0.0);
    for (double& lk : logk) {
        double s = 0.0;
        for (std::int64_t step = 0; step < t; ++step) s += dist.draw(rng);
        lk = s;
    }
    const double n = static_cast<double>(n_orgs);
    const auto [lo, hi] = std::minmax_element(logk.begin(), logk.end());
    if (*lo == *hi) {
        // a truly constant sample: rounding in the mean would otherwise leave
        // a spurious nonzero variance
        FitnessLimitResult out;
        out.n_orgs = n_orgs;
        out.t = t;
        out.mean_log_k = *lo;
        out.var_log_k = 0.0;
        out.jb_stat = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    double mean = 0.0;
    for (double v : logk) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : logk) {
        const double e = v - mean;
        m2 += e * e;
        m3 += e * e * e;
        m4 += e * e * e * e;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    FitnessLimitResult out;
    out.n_orgs = n_orgs;
    out.t = t;
    out.mean_log_k = mean;
    out.var_log_k = m2;
    if (m2 <= 0.0) {
        out.jb_stat = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    out.jb_stat = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    out.p_value = std::exp(-0.5 * out.jb_stat);
    return out;
}

} // namespace innodyn::laws
