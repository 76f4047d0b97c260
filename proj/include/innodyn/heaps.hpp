#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace innodyn::laws {

struct HeapsFit {
    double exponent = 0.0;  // slope of ln D on ln k
    double prefactor = 0.0; // exp(intercept)
    double std_err = 0.0;   // standard error of the exponent
    double r_squared = 0.0;
    std::int64_t n_points = 0;
};

// Log-log OLS of distinct types D against cumulative innovations k.
// Pairs with k < 1 or D < 1 are dropped; fewer than 3 usable pairs throws.
HeapsFit fit_heaps(const std::vector<std::pair<double, double>>& kd_pairs);

struct OdeSolution {
    std::vector<std::pair<double, double>> samples; // (k, D), ascending k
    double nu = 0.0;
    double rho = 0.0;
};

// Scaled residual of the implicit relation D^(rho/nu) - nu*D = (rho - nu)*k.
double implicit_residual(double nu, double rho, double k, double d);

// Integrates dD/dk = nu*D / (nu*D + rho*k) with adaptive fourth-order
// Runge-Kutta (step doubling). The initial point is placed on the implicit
// branch D^(rho/nu) - nu*D = (rho - nu)*k: pass d0 to start from D = d0 at
// the matching k0 >= 0, or d0 = 0 to use the branch's k = 0 root
// D = nu^(nu/(rho-nu)). For nu == rho the relation degenerates and the
// integration starts from (0, max(d0, 1)).
// Every returned sample is verified against the implicit relation to 1e-6
// relative (nu != rho); violations throw std::runtime_error.
OdeSolution solve_heaps_ode(double nu, double rho, double k_max, double d0 = 0.0,
                            int n_samples = 200);

} // namespace innodyn::laws
