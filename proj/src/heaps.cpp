#include "innodyn/heaps.hpp"

#include <cmath>
#include <stdexcept>

#include "innodyn/linfit.hpp"

namespace innodyn::laws {

HeapsFit fit_heaps(const std::vector<std::pair<double, double>>& kd_pairs) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(kd_pairs.size());
    for (const auto& [k, d] : kd_pairs)
        if (k >= 1.0 && d >= 1.0) logs.emplace_back(std::log(k), std::log(d));
    if (logs.size() < 3)
        throw std::invalid_argument("fit_heaps needs at least 3 pairs with k >= 1 and D >= 1");
    LinFit f = ols(logs);
    HeapsFit out;
    out.exponent = f.slope;
    out.prefactor = std::exp(f.intercept);
    out.std_err = f.slope_se;
    out.r_squared = f.r_squared;
    out.n_points = static_cast<std::int64_t>(f.n);
    return out;
}

namespace {

double heaps_rhs(double nu, double rho, double k, double d) {
    return nu * d / (nu * d + rho * k);
}

double rk4_step(double nu, double rho, double k, double d, double h) {
    const double k1 = heaps_rhs(nu, rho, k, d);
    const double k2 = heaps_rhs(nu, rho, k + 0.5 * h, d + 0.5 * h * k1);
    const double k3 = heaps_rhs(nu, rho, k + 0.5 * h, d + 0.5 * h * k2);
    const double k4 = heaps_rhs(nu, rho, k + h, d + h * k3);
    return d + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One accepted step of size h via step doubling, with Richardson error
// control against rtol.
double advance(double nu, double rho, double& k, double d, double& h, double rtol) {
    for (;;) {
        const double full = rk4_step(nu, rho, k, d, h);
        const double half = rk4_step(nu, rho, k + 0.5 * h,
                                     rk4_step(nu, rho, k, d, 0.5 * h), 0.5 * h);
        const double err = std::abs(full - half) / 15.0;
        const double tol = rtol * (std::abs(half) + 1e-12);
        if (err <= tol) {
            k += h;
            if (err < 0.1 * tol) h *= 2.0;
            return half + (half - full) / 15.0;
        }
        h *= 0.5;
        if (h < 1e-14 * (std::abs(k) + 1.0))
            throw std::runtime_error("solve_heaps_ode: step size underflow");
    }
}

} // namespace

double implicit_residual(double nu, double rho, double k, double d) {
    const double lhs = std::pow(d, rho / nu) - nu * d;
    const double rhs = (rho - nu) * k;
    const double scale = std::max({std::abs(std::pow(d, rho / nu)), std::abs(nu * d),
                                   std::abs(rhs), 1.0});
    return std::abs(lhs - rhs) / scale;
}

OdeSolution solve_heaps_ode(double nu, double rho, double k_max, double d0, int n_samples) {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
    if (!(k_max > 0.0)) throw std::invalid_argument("k_max must be > 0");
    if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
    if (d0 < 0.0) throw std::invalid_argument("d0 must be >= 0");

    double k0 = 0.0;
    double dstart;
    const bool degenerate = nu == rho;
    if (degenerate) {
        dstart = d0 > 0.0 ? d0 : 1.0;
    } else if (d0 > 0.0) {
        dstart = d0;
        k0 = (std::pow(d0, rho / nu) - nu * d0) / (rho - nu);
        if (k0 < 0.0)
            throw std::invalid_argument("d0 is off the implicit branch (k0 < 0)");
    } else {
        dstart = std::pow(nu, nu / (rho - nu)); // k = 0 root of the branch
    }
    if (k_max <= k0) throw std::invalid_argument("k_max must exceed the initial k0");

    // Log-spaced sample grid over [k0, k_max], endpoints included.
    std::vector<double> grid(static_cast<std::size_t>(n_samples));
    const double a = 1.0 + k0, b = 1.0 + k_max;
    for (int i = 0; i < n_samples; ++i)
        grid[static_cast<std::size_t>(i)] =
            a * std::pow(b / a, static_cast<double>(i) / (n_samples - 1)) - 1.0;
    grid.front() = k0;
    grid.back() = k_max;

    OdeSolution sol;
    sol.nu = nu;
    sol.rho = rho;
    sol.samples.reserve(grid.size());

    double k = k0, d = dstart;
    double h = std::max((k_max - k0) * 1e-9, 1e-9);
    for (double target : grid) {
        while (k < target) {
            if (k + h > target) {
                // Land exactly on the sample point with a single capped step.
                double hs = target - k;
                d = rk4_step(nu, rho, k + 0.5 * hs,
                             rk4_step(nu, rho, k, d, 0.5 * hs), 0.5 * hs);
                k = target;
            } else {
                d = advance(nu, rho, k, d, h, 1e-10);
            }
        }
        if (!degenerate && implicit_residual(nu, rho, k, d) > 1e-6)
            throw std::runtime_error("solve_heaps_ode: implicit relation violated");
        sol.samples.emplace_back(k, d);
    }
    return sol;
}

} // namespace innodyn::laws
